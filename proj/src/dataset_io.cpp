#include "bie/dataset_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "bie/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace bie {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& os, const double* p, std::size_t n) {
    os.write(reinterpret_cast<const char*>(p), std::streamsize(8 * n));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    require(bool(is), errc::io_error, "unexpected end of file");
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    require(bool(is), errc::io_error, "unexpected end of file");
    return v;
}

void get_f64(std::istream& is, double* p, std::size_t n) {
    is.read(reinterpret_cast<char*>(p), std::streamsize(8 * n));
    require(bool(is), errc::io_error, "unexpected end of file");
}

void check_magic(std::istream& is, const char expect[4], const char* what) {
    char m[4] = {};
    is.read(m, 4);
    require(bool(is) && std::memcmp(m, expect, 4) == 0, errc::io_error,
            std::string("not a ") + what + " file (bad magic)");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(bool(os), errc::io_error, "cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), errc::io_error, "cannot open for reading: " + path);
    return is;
}

void append_csv_cell(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += ',';
    line += buf;
}

}  // namespace

void write_dataset(const std::string& path, const dataset& ds) {
    std::ofstream os = open_out(path);
    os.write("BIED", 4);
    put_u32(os, 1);
    put_u32(os, std::uint32_t(ds.kind));
    put_u32(os, ds.n_b);
    put_u32(os, ds.n_f);
    put_u32(os, ds.components);
    put_u32(os, 4);  // metadata slots per record
    put_u64(os, ds.records.size());
    for (const dataset_record& r : ds.records) {
        require(r.gamma.size() == ds.gamma_len() &&
                    r.rhs.size() == ds.field_len() &&
                    r.density.size() == ds.field_len(),
                errc::invalid_argument, "write_dataset: malformed record");
        put_f64(os, r.meta.data(), 4);
        put_f64(os, r.gamma.data(), r.gamma.size());
        put_f64(os, r.rhs.data(), r.rhs.size());
        put_f64(os, r.density.data(), r.density.size());
    }
    require(bool(os), errc::io_error, "write failed: " + path);
}

dataset read_dataset(const std::string& path) {
    std::ifstream is = open_in(path);
    check_magic(is, "BIED", "dataset");
    const std::uint32_t version = get_u32(is);
    require(version == 1, errc::unsupported, "unsupported dataset version");
    dataset ds;
    const std::uint32_t kind = get_u32(is);
    require(kind <= std::uint32_t(bvp_kind::helmholtz), errc::io_error,
            "dataset: invalid family tag");
    ds.kind = bvp_kind(kind);
    ds.n_b = get_u32(is);
    ds.n_f = get_u32(is);
    ds.components = get_u32(is);
    require(ds.components == 1 || ds.components == 2, errc::io_error,
            "dataset: invalid component count");
    const std::uint32_t meta_len = get_u32(is);
    require(meta_len == 4, errc::unsupported, "dataset: unsupported metadata size");
    const std::uint64_t count = get_u64(is);
    ds.records.resize(count);
    for (dataset_record& r : ds.records) {
        r.gamma.resize(ds.gamma_len());
        r.rhs.resize(ds.field_len());
        r.density.resize(ds.field_len());
        get_f64(is, r.meta.data(), 4);
        get_f64(is, r.gamma.data(), r.gamma.size());
        get_f64(is, r.rhs.data(), r.rhs.size());
        get_f64(is, r.density.data(), r.density.size());
    }
    return ds;
}

void write_dataset_csv(const std::string& path, const dataset& ds) {
    std::ofstream os = open_out(path);
    std::string line = "index,kind,meta0,meta1,meta2,meta3";
    const std::size_t nb = 2 * std::size_t(ds.n_b) + 1;
    const std::size_t nf = 2 * std::size_t(ds.n_f) + 1;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < nb; ++i)
            line += ",gamma" + std::to_string(c) + "_" + std::to_string(i);
    for (std::size_t c = 0; c < ds.components; ++c)
        for (std::size_t i = 0; i < nf; ++i)
            line += ",rhs" + std::to_string(c) + "_" + std::to_string(i);
    for (std::size_t c = 0; c < ds.components; ++c)
        for (std::size_t i = 0; i < nf; ++i)
            line += ",density" + std::to_string(c) + "_" + std::to_string(i);
    os << line << '\n';
    for (std::size_t idx = 0; idx < ds.records.size(); ++idx) {
        const dataset_record& r = ds.records[idx];
        line = std::to_string(idx);
        line += ',';
        line += bvp_kind_name(ds.kind);
        for (double v : r.meta) append_csv_cell(line, v);
        for (double v : r.gamma) append_csv_cell(line, v);
        for (double v : r.rhs) append_csv_cell(line, v);
        for (double v : r.density) append_csv_cell(line, v);
        os << line << '\n';
    }
    require(bool(os), errc::io_error, "write failed: " + path);
}

void write_boundaries(const std::string& path, const boundary_set& bs) {
    require(bs.items.size() == bs.rho.size() && bs.items.size() == bs.seed.size(),
            errc::invalid_argument, "write_boundaries: mismatched metadata");
    std::ofstream os = open_out(path);
    os.write("BIEB", 4);
    put_u32(os, 1);
    put_u32(os, bs.n);
    put_u64(os, bs.items.size());
    const std::size_t len = 2 * std::size_t(bs.n) + 1;
    for (std::size_t i = 0; i < bs.items.size(); ++i) {
        const boundary& b = bs.items[i];
        require(b.x.size() == len && b.y.size() == len, errc::invalid_argument,
                "write_boundaries: order mismatch");
        put_f64(os, &bs.rho[i], 1);
        put_u64(os, bs.seed[i]);
        put_f64(os, b.x.data(), len);
        put_f64(os, b.y.data(), len);
    }
    require(bool(os), errc::io_error, "write failed: " + path);
}

boundary_set read_boundaries(const std::string& path) {
    std::ifstream is = open_in(path);
    check_magic(is, "BIEB", "boundary");
    const std::uint32_t version = get_u32(is);
    require(version == 1, errc::unsupported, "unsupported boundary-file version");
    boundary_set bs;
    bs.n = get_u32(is);
    const std::uint64_t count = get_u64(is);
    const std::size_t len = 2 * std::size_t(bs.n) + 1;
    bs.items.resize(count);
    bs.rho.resize(count);
    bs.seed.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        get_f64(is, &bs.rho[i], 1);
        bs.seed[i] = get_u64(is);
        bs.items[i].x.resize(len);
        bs.items[i].y.resize(len);
        get_f64(is, bs.items[i].x.data(), len);
        get_f64(is, bs.items[i].y.data(), len);
    }
    return bs;
}

void write_boundaries_csv(const std::string& path, const boundary_set& bs) {
    std::ofstream os = open_out(path);
    std::string line = "index,rho,seed";
    const std::size_t len = 2 * std::size_t(bs.n) + 1;
    for (std::size_t i = 0; i < len; ++i) line += ",x_" + std::to_string(i);
    for (std::size_t i = 0; i < len; ++i) line += ",y_" + std::to_string(i);
    os << line << '\n';
    for (std::size_t i = 0; i < bs.items.size(); ++i) {
        line = std::to_string(i);
        append_csv_cell(line, bs.rho[i]);
        line += ',' + std::to_string(bs.seed[i]);
        for (double v : bs.items[i].x) append_csv_cell(line, v);
        for (double v : bs.items[i].y) append_csv_cell(line, v);
        os << line << '\n';
    }
    require(bool(os), errc::io_error, "write failed: " + path);
}

bool files_identical(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    require(bool(fa), errc::io_error, "cannot open for reading: " + a);
    require(bool(fb), errc::io_error, "cannot open for reading: " + b);
    constexpr std::size_t chunk = 1 << 16;
    std::vector<char> ba(chunk), bb(chunk);
    for (;;) {
        fa.read(ba.data(), chunk);
        fb.read(bb.data(), chunk);
        if (fa.gcount() != fb.gcount()) return false;
        if (std::memcmp(ba.data(), bb.data(), std::size_t(fa.gcount())) != 0)
            return false;
        if (fa.eof() && fb.eof()) return true;
        if (fa.eof() != fb.eof()) return false;
    }
}

}  // namespace bie
