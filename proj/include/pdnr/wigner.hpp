#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pdnr/fock.hpp"
#include "pdnr/io.hpp"
#include "pdnr/master.hpp"
#include "pdnr/parallel.hpp"

namespace pdnr {

struct GridSpec {
    double span = 6.0;  // half-width; axes run over [-span, span]
    int points = 101;
    int workers = 0;  // 0 = default_worker_count()
};

// W on a Cartesian quadrature grid, X = (alpha+alpha*)/2, Y = (alpha-alpha*)/2i.
// values(i, j) = W(x(i), y(j)).
struct WignerGrid {
    Eigen::VectorXd x, y;
    Eigen::MatrixXd values;
    double time = 0.0;
    std::uint64_t params_hash = 0;
    double max_imag_residue = 0.0;
};

inline Eigen::VectorXd symmetric_axis(double span, int points) {
    if (points < 2) throw std::invalid_argument("wigner grid needs at least 2 points per axis");
    if (span <= 0.0) throw std::invalid_argument("wigner grid span must be positive");
    Eigen::VectorXd ax(points);
    const double h = 2.0 * span / (points - 1);
    const double c = 0.5 * (points - 1);
    for (int i = 0; i < points; ++i) ax(i) = (static_cast<double>(i) - c) * h;
    return ax;
}

// Displaced-parity evaluation: W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^dag].
// This is the production path; the quadrature-integral oracle lives in the
// test suite and must stay independent of it.
inline WignerGrid wigner_from_density(const Density& rho, const GridSpec& spec,
                                      double time = 0.0, std::uint64_t hash = 0) {
    const int d = static_cast<int>(rho.rows());
    if (rho.cols() != d || d < 2) throw std::invalid_argument("wigner_from_density: bad rho");
    const double top = rho(d - 1, d - 1).real();
    if (top > 1e-6)
        throw truncation_error("wigner_from_density: top-level population " +
                               std::to_string(top) + " > 1e-6; raise dim");

    WignerGrid grid;
    grid.x = symmetric_axis(spec.span, spec.points);
    grid.y = symmetric_axis(spec.span, spec.points);
    grid.values.resize(spec.points, spec.points);
    grid.time = time;
    grid.params_hash = hash;

    std::vector<double> row_residue(static_cast<std::size_t>(spec.points), 0.0);
    auto eval_row = [&](int i) {
        double residue = 0.0;
        for (int j = 0; j < spec.points; ++j) {
            const Complex alpha{grid.x(i), grid.y(j)};
            const Operator disp = displacement(alpha, d);
            const Operator rd = rho * disp;
            Complex tr{0.0, 0.0};
            for (int n = 0; n < d; ++n) {
                const Complex v = disp.col(n).dot(rd.col(n));
                tr += (n % 2 == 0) ? v : -v;
            }
            tr *= 2.0 / M_PI;
            grid.values(i, j) = tr.real();
            residue = std::max(residue, std::abs(tr.imag()));
        }
        row_residue[static_cast<std::size_t>(i)] = residue;
    };
    const int workers = spec.workers > 0 ? spec.workers : default_worker_count();
    run_blocks(spec.points, workers, eval_row);
    for (double r : row_residue) grid.max_imag_residue = std::max(grid.max_imag_residue, r);
    return grid;
}

// max |W(X,Y) - W(-X,-Y)| / max |W|. Zero iff the grid has exact two-fold
// symmetry under rotation by pi about the origin.
inline double symmetry_defect(const WignerGrid& grid) {
    const int nx = static_cast<int>(grid.x.size());
    const int ny = static_cast<int>(grid.y.size());
    for (int i = 0; i < nx; ++i)
        if (std::abs(grid.x(i) + grid.x(nx - 1 - i)) > 1e-12 * std::max(1.0, std::abs(grid.x(i))))
            throw std::invalid_argument("symmetry_defect: x axis not symmetric about 0");
    for (int j = 0; j < ny; ++j)
        if (std::abs(grid.y(j) + grid.y(ny - 1 - j)) > 1e-12 * std::max(1.0, std::abs(grid.y(j))))
            throw std::invalid_argument("symmetry_defect: y axis not symmetric about 0");
    const double wmax = grid.values.cwiseAbs().maxCoeff();
    if (wmax == 0.0) return 0.0;
    double defect = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            defect = std::max(defect,
                              std::abs(grid.values(i, j) - grid.values(nx - 1 - i, ny - 1 - j)));
    return defect / wmax;
}

struct Hump {
    double x = 0.0, y = 0.0, w = 0.0;
    double r = 0.0, theta = 0.0;  // theta in (-pi, pi]
};

struct HumpReport {
    std::vector<Hump> humps;
    std::vector<double> phase_differences;  // pairwise |wrapped|, in [0, pi]
    double two_hump_phase_difference = 0.0;  // set when exactly two humps
    double two_hump_height_ratio = 0.0;      // min/max, set when exactly two humps
};

// Interior strict 8-neighbor local maxima above threshold_fraction * max(W).
inline HumpReport find_humps(const WignerGrid& grid, double threshold_fraction = 0.2) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::invalid_argument("find_humps: threshold fraction must be in (0,1)");
    HumpReport report;
    const int nx = static_cast<int>(grid.x.size());
    const int ny = static_cast<int>(grid.y.size());
    const double cut = threshold_fraction * grid.values.maxCoeff();
    for (int i = 1; i + 1 < nx; ++i) {
        for (int j = 1; j + 1 < ny; ++j) {
            const double w = grid.values(i, j);
            if (w <= cut) continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (grid.values(i + di, j + dj) >= w) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            Hump h;
            h.x = grid.x(i);
            h.y = grid.y(j);
            h.w = w;
            h.r = std::hypot(h.x, h.y);
            h.theta = std::atan2(h.y, h.x);
            if (h.theta <= -M_PI) h.theta = M_PI;
            report.humps.push_back(h);
        }
    }
    for (std::size_t a = 0; a < report.humps.size(); ++a)
        for (std::size_t b = a + 1; b < report.humps.size(); ++b) {
            double dtheta = std::abs(report.humps[a].theta - report.humps[b].theta);
            if (dtheta > M_PI) dtheta = 2.0 * M_PI - dtheta;
            report.phase_differences.push_back(dtheta);
        }
    if (report.humps.size() == 2) {
        report.two_hump_phase_difference = report.phase_differences.front();
        const double w0 = report.humps[0].w, w1 = report.humps[1].w;
        report.two_hump_height_ratio = std::min(w0, w1) / std::max(w0, w1);
    }
    return report;
}

// Trapezoidal integral of W over the grid.
inline double normalization(const WignerGrid& grid) {
    const int nx = static_cast<int>(grid.x.size());
    const int ny = static_cast<int>(grid.y.size());
    const double hx = grid.x(1) - grid.x(0);
    const double hy = grid.y(1) - grid.y(0);
    double sum = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            sum += wx * wy * grid.values(i, j);
        }
    }
    return sum * hx * hy;
}

struct GridMoments {
    double norm = 0.0;
    double mean_x = 0.0, mean_y = 0.0;
    double var_x = 0.0, var_y = 0.0, cov_xy = 0.0;
    double principal_var_min = 0.0, principal_var_max = 0.0;
};

// First and second moments of W by trapezoidal quadrature; the principal
// variances are the eigenvalues of the 2x2 covariance (vacuum level: 1/4).
inline GridMoments grid_moments(const WignerGrid& grid) {
    const int nx = static_cast<int>(grid.x.size());
    const int ny = static_cast<int>(grid.y.size());
    const double hx = grid.x(1) - grid.x(0);
    const double hy = grid.y(1) - grid.y(0);
    GridMoments m;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            const double w = wx * wy * grid.values(i, j);
            m.norm += w;
            sx += w * grid.x(i);
            sy += w * grid.y(j);
            sxx += w * grid.x(i) * grid.x(i);
            syy += w * grid.y(j) * grid.y(j);
            sxy += w * grid.x(i) * grid.y(j);
        }
    }
    m.norm *= hx * hy;
    sx *= hx * hy;
    sy *= hx * hy;
    sxx *= hx * hy;
    syy *= hx * hy;
    sxy *= hx * hy;
    m.mean_x = sx / m.norm;
    m.mean_y = sy / m.norm;
    m.var_x = sxx / m.norm - m.mean_x * m.mean_x;
    m.var_y = syy / m.norm - m.mean_y * m.mean_y;
    m.cov_xy = sxy / m.norm - m.mean_x * m.mean_y;
    const double tr2 = 0.5 * (m.var_x + m.var_y);
    const double disc = std::sqrt(0.25 * (m.var_x - m.var_y) * (m.var_x - m.var_y) +
                                  m.cov_xy * m.cov_xy);
    m.principal_var_min = tr2 - disc;
    m.principal_var_max = tr2 + disc;
    return m;
}

// Plain-text matrix format: header block, then one row per x index.
// Significant digits: 9 normally, 17 in golden mode; both round-trip exactly.
inline std::string grid_to_text(const WignerGrid& grid, int digits = 9) {
    std::ostringstream out;
    out << "# pdnr wigner grid\n";
    out << "# time = " << format_float(grid.time, 17) << "\n";
    out << "# params_hash = " << hex64(grid.params_hash) << "\n";
    out << "# nx = " << grid.x.size() << "\n";
    out << "# ny = " << grid.y.size() << "\n";
    out << "# x =";
    for (int i = 0; i < grid.x.size(); ++i) out << ' ' << format_float(grid.x(i), digits);
    out << "\n# y =";
    for (int j = 0; j < grid.y.size(); ++j) out << ' ' << format_float(grid.y(j), digits);
    out << "\n";
    for (int i = 0; i < grid.x.size(); ++i) {
        for (int j = 0; j < grid.y.size(); ++j) {
            if (j) out << ' ';
            out << format_float(grid.values(i, j), digits);
        }
        out << "\n";
    }
    return out.str();
}

inline WignerGrid grid_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    WignerGrid grid;
    long nx = -1, ny = -1;
    std::vector<double> xs, ys;
    auto parse_values = [](const std::string& s, std::vector<double>& dst) {
        std::istringstream vs(s);
        double v = 0.0;
        while (vs >> v) dst.push_back(v);
    };
    while (std::getline(in, line)) {
        if (line.rfind("# pdnr wigner grid", 0) == 0) continue;
        if (line.rfind("# time = ", 0) == 0) {
            grid.time = std::stod(line.substr(9));
        } else if (line.rfind("# params_hash = ", 0) == 0) {
            grid.params_hash = std::stoull(line.substr(16), nullptr, 16);
        } else if (line.rfind("# nx = ", 0) == 0) {
            nx = std::stol(line.substr(7));
        } else if (line.rfind("# ny = ", 0) == 0) {
            ny = std::stol(line.substr(7));
        } else if (line.rfind("# x =", 0) == 0) {
            parse_values(line.substr(5), xs);
        } else if (line.rfind("# y =", 0) == 0) {
            parse_values(line.substr(5), ys);
        } else {
            break;
        }
    }
    if (nx <= 0 || ny <= 0 || static_cast<long>(xs.size()) != nx ||
        static_cast<long>(ys.size()) != ny)
        throw std::runtime_error("grid_from_text: malformed header");
    grid.x = Eigen::Map<Eigen::VectorXd>(xs.data(), nx);
    grid.y = Eigen::Map<Eigen::VectorXd>(ys.data(), ny);
    grid.values.resize(nx, ny);
    long row = 0;
    do {
        if (line.empty()) continue;
        std::vector<double> vals;
        parse_values(line, vals);
        if (static_cast<long>(vals.size()) != ny)
            throw std::runtime_error("grid_from_text: bad row length at row " +
                                     std::to_string(row));
        if (row >= nx) throw std::runtime_error("grid_from_text: too many rows");
        for (long j = 0; j < ny; ++j) grid.values(row, j) = vals[static_cast<std::size_t>(j)];
        ++row;
    } while (std::getline(in, line));
    if (row != nx) throw std::runtime_error("grid_from_text: missing rows");
    return grid;
}

// Long-form CSV (x,y,w) for plotting tools.
inline std::string grid_to_csv(const WignerGrid& grid, int digits = 9) {
    std::ostringstream out;
    out << "x,y,w\n";
    for (int i = 0; i < grid.x.size(); ++i)
        for (int j = 0; j < grid.y.size(); ++j)
            out << format_float(grid.x(i), digits) << ',' << format_float(grid.y(j), digits)
                << ',' << format_float(grid.values(i, j), digits) << "\n";
    return out.str();
}

}  // namespace pdnr
