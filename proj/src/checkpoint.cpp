#include "bie/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "bie/errors.hpp"

namespace bie {

namespace {

constexpr char magic[4] = {'B', 'I', 'O', 'P'};
constexpr std::uint32_t version = 1;

template <class T>
void put(std::ostream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    require(bool(f), errc::io_error, "checkpoint: truncated file");
    return v;
}

void put_net(std::ostream& f, const fnn_spec& s) {
    put<std::uint32_t>(f, std::uint32_t(s.widths.size()));
    for (std::size_t w : s.widths) put<std::uint64_t>(f, w);
}

fnn_spec get_net(std::istream& f) {
    const std::uint32_t n = get<std::uint32_t>(f);
    require(n <= 1024, errc::io_error, "checkpoint: absurd layer count");
    fnn_spec s;
    s.widths.resize(n);
    for (auto& w : s.widths) {
        w = std::size_t(get<std::uint64_t>(f));
        require(w >= 1 && w <= (1u << 24), errc::io_error,
                "checkpoint: bad layer width");
    }
    return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const operator_model& model,
                     const checkpoint_meta& meta) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), errc::io_error, "cannot open " + path);
    f.write(magic, 4);
    put<std::uint32_t>(f, version);

    const model_descriptor d = describe(model);
    put<std::uint32_t>(f, std::uint32_t(d.type));
    put_net(f, d.net_a);
    put_net(f, d.net_b);
    put_net(f, d.net_c);
    put<double>(f, d.output_scale);
    put<std::uint64_t>(f, d.sample_points);

    const std::vector<double>& p = model.params();
    put<std::uint64_t>(f, p.size());
    f.write(reinterpret_cast<const char*>(p.data()),
            std::streamsize(p.size() * sizeof(double)));

    put<std::uint64_t>(f, meta.epochs);
    put<std::uint64_t>(f, meta.best_epoch);
    put<double>(f, meta.best_test_loss);
    put<double>(f, meta.final_lr);
    put<std::uint64_t>(f, meta.seed);
    require(f.good(), errc::io_error, "write failed: " + path);
}

std::unique_ptr<operator_model> load_checkpoint(const std::string& path,
                                                checkpoint_meta* meta) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), errc::io_error, "cannot open " + path);
    char m4[4];
    f.read(m4, 4);
    require(bool(f) && std::equal(m4, m4 + 4, magic), errc::io_error,
            "checkpoint: bad magic");
    require(get<std::uint32_t>(f) == version, errc::unsupported,
            "checkpoint: unknown version");

    model_descriptor d;
    const std::uint32_t type = get<std::uint32_t>(f);
    require(type <= std::uint32_t(model_type::deeponet), errc::io_error,
            "checkpoint: unknown model type");
    d.type = model_type(type);
    d.net_a = get_net(f);
    d.net_b = get_net(f);
    d.net_c = get_net(f);
    d.output_scale = get<double>(f);
    d.sample_points = std::size_t(get<std::uint64_t>(f));

    auto model = make_model(d);
    const std::uint64_t n = get<std::uint64_t>(f);
    require(n == model->param_count(), errc::io_error,
            "checkpoint: parameter count does not match the architecture");
    f.read(reinterpret_cast<char*>(model->params().data()),
           std::streamsize(n * sizeof(double)));
    require(bool(f), errc::io_error, "checkpoint: truncated parameters");

    checkpoint_meta cm;
    cm.epochs = get<std::uint64_t>(f);
    cm.best_epoch = get<std::uint64_t>(f);
    cm.best_test_loss = get<double>(f);
    cm.final_lr = get<double>(f);
    cm.seed = get<std::uint64_t>(f);
    if (meta) *meta = cm;
    return model;
}

}  // namespace bie
