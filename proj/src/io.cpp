#include "lrtfr/io.hpp"

#include <unistd.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace lrtfr {

namespace {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

constexpr Index kMaxElements = 1LL << 30;  // dim-overflow guard for readers

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& os, const double* data, std::size_t n) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint64_t read_u64(std::istream& is, const std::string& path) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (is.gcount() != sizeof v) throw FormatError("truncated header in " + path);
    return v;
}

void read_f64(std::istream& is, double* data, std::size_t n, const std::string& path) {
    const std::streamsize want = static_cast<std::streamsize>(n * sizeof(double));
    is.read(reinterpret_cast<char*>(data), want);
    if (is.gcount() != want) throw FormatError("truncated payload in " + path);
}

void expect_magic(std::istream& is, const char* magic, const std::string& path) {
    char buf[4];
    is.read(buf, 4);
    if (is.gcount() != 4 || std::memcmp(buf, magic, 4) != 0) {
        throw FormatError("bad magic in " + path + " (expected " + magic + ")");
    }
}

void expect_eof(std::istream& is, const std::string& path) {
    if (is.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after payload in " + path);
    }
}

template <typename Body>
void atomic_write(const std::string& path, Body body) {
    const std::string tmp = path + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        body(os);
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

Dims3 read_dims(std::istream& is, const std::string& path) {
    Dims3 dims;
    for (auto& d : dims) {
        const std::uint64_t v = read_u64(is, path);
        if (v == 0 || v > static_cast<std::uint64_t>(kMaxElements)) {
            throw FormatError("dimension out of range in " + path);
        }
        d = static_cast<Index>(v);
    }
    if (dims[0] > kMaxElements / dims[1] || dims[0] * dims[1] > kMaxElements / dims[2]) {
        throw FormatError("element count overflows in " + path);
    }
    return dims;
}

DenseTensor3 read_tensor_body(std::istream& is, const std::string& path) {
    const Dims3 dims = read_dims(is, path);
    std::vector<double> data(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]));
    read_f64(is, data.data(), data.size(), path);
    try {
        return DenseTensor3::from_data(dims, std::move(data));
    } catch (const NumericalError& e) {
        throw FormatError(std::string("invalid tensor values in ") + path + ": " + e.what());
    }
}

void write_matrix_rowmajor(std::ostream& os, const Matrix& m) {
    write_u64(os, static_cast<std::uint64_t>(m.rows()));
    write_u64(os, static_cast<std::uint64_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            write_f64(os, &v, 1);
        }
    }
}

Matrix read_matrix_rowmajor(std::istream& is, const std::string& path) {
    const std::uint64_t rows = read_u64(is, path);
    const std::uint64_t cols = read_u64(is, path);
    if (rows == 0 || cols == 0 || rows > static_cast<std::uint64_t>(kMaxElements) ||
        cols > static_cast<std::uint64_t>(kMaxElements) ||
        rows > static_cast<std::uint64_t>(kMaxElements) / cols) {
        throw FormatError("matrix dims out of range in " + path);
    }
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::vector<double> buf(static_cast<std::size_t>(rows * cols));
    read_f64(is, buf.data(), buf.size(), path);
    std::size_t p = 0;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = buf[p++];
    }
    return m;
}

void write_mlp(std::ostream& os, const Mlp& mlp) {
    os.write("LRM1", 4);
    write_u64(os, static_cast<std::uint64_t>(mlp.weights.size()));
    for (const Matrix& w : mlp.weights) write_matrix_rowmajor(os, w);
}

Mlp read_mlp(std::istream& is, const std::string& path) {
    expect_magic(is, "LRM1", path);
    const std::uint64_t count = read_u64(is, path);
    if (count < 2 || count > 4096) throw FormatError("mlp layer count out of range in " + path);
    Mlp mlp;
    mlp.weights.reserve(count);
    for (std::uint64_t l = 0; l < count; ++l) mlp.weights.push_back(read_matrix_rowmajor(is, path));
    return mlp;
}

}  // namespace

DenseTensor3 load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    expect_magic(is, "LRT1", path);
    DenseTensor3 t = read_tensor_body(is, path);
    expect_eof(is, path);
    return t;
}

void save_tensor(const DenseTensor3& t, const std::string& path) {
    atomic_write(path, [&](std::ostream& os) {
        os.write("LRT1", 4);
        for (const Index d : t.dims()) write_u64(os, static_cast<std::uint64_t>(d));
        write_f64(os, t.data().data(), t.data().size());
    });
}

Mask3 load_mask(const std::string& path) { return Mask3::from_tensor(load_tensor(path)); }

void save_mask(const Mask3& m, const std::string& path) { save_tensor(m.as_tensor(), path); }

LrtfrModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    expect_magic(is, "LRF1", path);
    LrtfrModel m;
    const Dims3 ranks = read_dims(is, path);
    std::vector<double> core(static_cast<std::size_t>(ranks[0] * ranks[1] * ranks[2]));
    read_f64(is, core.data(), core.size(), path);
    try {
        m.core = DenseTensor3::from_data(ranks, std::move(core));
    } catch (const NumericalError& e) {
        throw FormatError(std::string("invalid core values in ") + path + ": " + e.what());
    }
    m.mlp_x = read_mlp(is, path);
    m.mlp_y = read_mlp(is, path);
    m.mlp_z = read_mlp(is, path);
    for (auto& iv : m.domain) {
        read_f64(is, &iv.lo, 1, path);
        read_f64(is, &iv.hi, 1, path);
    }
    double omegas[3];
    read_f64(is, omegas, 3, path);
    m.mlp_x.omega0 = omegas[0];
    m.mlp_y.omega0 = omegas[1];
    m.mlp_z.omega0 = omegas[2];
    const Mlp* mlps[3] = {&m.mlp_x, &m.mlp_y, &m.mlp_z};
    for (const Mlp* mlp : mlps) {
        const std::uint64_t d = read_u64(is, path);
        if (d != mlp->weights.size()) {
            throw FormatError("depth trailer disagrees with stored layers in " + path);
        }
    }
    expect_eof(is, path);
    try {
        m.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("inconsistent model in ") + path + ": " + e.what());
    }
    return m;
}

void save_model(const LrtfrModel& m, const std::string& path) {
    m.validate();
    atomic_write(path, [&](std::ostream& os) {
        os.write("LRF1", 4);
        for (const Index r : m.core.dims()) write_u64(os, static_cast<std::uint64_t>(r));
        write_f64(os, m.core.data().data(), m.core.data().size());
        write_mlp(os, m.mlp_x);
        write_mlp(os, m.mlp_y);
        write_mlp(os, m.mlp_z);
        for (const Interval& iv : m.domain) {
            write_f64(os, &iv.lo, 1);
            write_f64(os, &iv.hi, 1);
        }
        const double omegas[3] = {m.mlp_x.omega0, m.mlp_y.omega0, m.mlp_z.omega0};
        write_f64(os, omegas, 3);
        const Mlp* mlps[3] = {&m.mlp_x, &m.mlp_y, &m.mlp_z};
        for (const Mlp* mlp : mlps) write_u64(os, static_cast<std::uint64_t>(mlp->weights.size()));
    });
}

Matrix load_pointcloud(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::vector<std::array<double, 3>> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (is.peek() == std::char_traits<char>::eof()) break;
            throw FormatError("blank line " + std::to_string(lineno) + " in " + path);
        }
        std::istringstream ls(line);
        std::array<double, 3> p{};
        if (!(ls >> p[0] >> p[1] >> p[2])) {
            throw FormatError("line " + std::to_string(lineno) + " of " + path +
                              " is not three floats");
        }
        std::string extra;
        if (ls >> extra) {
            throw FormatError("line " + std::to_string(lineno) + " of " + path +
                              " has trailing fields");
        }
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
            throw FormatError("non-finite point on line " + std::to_string(lineno) + " of " + path);
        }
        pts.push_back(p);
    }
    if (pts.empty()) throw FormatError("empty point cloud in " + path);
    Matrix out(static_cast<Index>(pts.size()), 3);
    for (Index i = 0; i < out.rows(); ++i) {
        out(i, 0) = pts[static_cast<std::size_t>(i)][0];
        out(i, 1) = pts[static_cast<std::size_t>(i)][1];
        out(i, 2) = pts[static_cast<std::size_t>(i)][2];
    }
    return out;
}

void save_pointcloud(const Matrix& points, const std::string& path) {
    if (points.cols() != 3) throw DimensionError("point cloud must be n x 3");
    if (!points.allFinite()) throw NumericalError("point cloud has non-finite coordinates");
    atomic_write(path, [&](std::ostream& os) {
        char buf[96];
        for (Index i = 0; i < points.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", points(i, 0), points(i, 1),
                          points(i, 2));
            os << buf;
        }
    });
}

HpoGrid load_hpo_grid(const std::string& path, Index dataset_count) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    const auto parse_line = [&path](const std::string& line, int which) {
        std::vector<double> vals;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string tok = line.substr(start, comma - start);
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
                throw FormatError("bad value '" + tok + "' on axis line " + std::to_string(which) +
                                  " of " + path);
            }
            vals.push_back(v);
            start = comma + 1;
        }
        Vector out(static_cast<Index>(vals.size()));
        for (Index i = 0; i < out.size(); ++i) out(i) = vals[static_cast<std::size_t>(i)];
        return out;
    };
    std::string l1, l2;
    if (!std::getline(is, l1) || !std::getline(is, l2)) {
        throw FormatError("hyperparameter grid needs two axis lines in " + path);
    }
    if (!l1.empty() && l1.back() == '\r') l1.pop_back();
    if (!l2.empty() && l2.back() == '\r') l2.pop_back();
    HpoGrid g;
    g.axis1 = parse_line(l1, 1);
    g.axis2 = parse_line(l2, 2);
    g.dataset_count = dataset_count;
    return g;
}

int worker_cap() {
    const char* env = std::getenv("LRTFR_THREADS");
    if (env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw std::invalid_argument("LRTFR_THREADS must be a positive integer");
        }
        return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace lrtfr
