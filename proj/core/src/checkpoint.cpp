#include "prefdiff/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "prefdiff/csv.hpp"

namespace prefdiff {

namespace {
constexpr const char* kMagic = "prefdiff-checkpoint v1";
}

void save_checkpoint(const DenoiserNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
    const DenoiserConfig& c = net.config();
    out << kMagic << "\n";
    out << c.sample_dim << " " << c.n_conditions << " " << c.hidden_dim << " " << c.n_hidden_layers << " "
        << c.time_embed_dim << "\n";
    out << net.params().size() << "\n";
    for (const Tensor& p : net.params()) {
        out << p.rank();
        for (int d : p.shape()) out << " " << d;
        out << "\n";
        for (int i = 0; i < p.size(); ++i) {
            if (i) out << " ";
            out << format_double(p[i]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

DenoiserNet load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != kMagic) throw std::runtime_error("checkpoint: bad magic in " + path);

    DenoiserConfig c;
    size_t n_params = 0;
    if (!(in >> c.sample_dim >> c.n_conditions >> c.hidden_dim >> c.n_hidden_layers >> c.time_embed_dim >>
          n_params))
        throw std::runtime_error("checkpoint: truncated header in " + path);

    std::vector<Tensor> params;
    params.reserve(n_params);
    for (size_t i = 0; i < n_params; ++i) {
        int rank = 0;
        if (!(in >> rank) || rank < 0 || rank > 2)
            throw std::runtime_error("checkpoint: bad tensor rank in " + path);
        std::vector<int> shape(static_cast<size_t>(rank));
        size_t n = 1;
        for (int d = 0; d < rank; ++d) {
            if (!(in >> shape[static_cast<size_t>(d)]))
                throw std::runtime_error("checkpoint: truncated shape in " + path);
            n *= static_cast<size_t>(shape[static_cast<size_t>(d)]);
        }
        std::vector<double> data(n);
        for (size_t k = 0; k < n; ++k)
            if (!(in >> data[k])) throw std::runtime_error("checkpoint: truncated values in " + path);
        params.emplace_back(std::move(shape), std::move(data));
    }
    return DenoiserNet(c, std::move(params));
}

}  // namespace prefdiff
