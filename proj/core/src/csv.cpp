#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "focs/harness.hpp"

namespace focs {

namespace {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void export_csv(const SimulationRecord& rec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_csv: cannot open " + path.string());
    out << "t";
    for (std::size_t i = 1; i <= rec.n; ++i) out << ",x_" << i;
    out << ",y,r,eps,v,w,u,delta_w";
    for (std::size_t i = 1; i <= rec.n; ++i) out << ",lambda_" << i;
    for (std::size_t j = 1; j <= rec.q; ++j) out << ",theta_hat_" << j;
    out << ",D_hat,p_hat\n";
    const bool has_lambda = !rec.lambda.empty();
    for (std::size_t k = 0; k < rec.samples(); ++k) {
        out << format_full(rec.t[k]);
        for (std::size_t i = 0; i < rec.n; ++i) out << ',' << format_full(rec.x[i][k]);
        out << ',' << format_full(rec.y[k]) << ',' << format_full(rec.r[k]) << ','
            << format_full(rec.eps[k]) << ',' << format_full(rec.v[k]) << ','
            << format_full(rec.w[k]) << ',' << format_full(rec.u[k]) << ','
            << format_full(rec.delta_w[k]);
        for (std::size_t i = 0; i < rec.n; ++i) {
            out << ',';
            if (has_lambda) out << format_full(rec.lambda[i][k]);
        }
        for (std::size_t j = 0; j < rec.q; ++j) out << ',' << format_full(rec.theta_hat[j][k]);
        out << ',';
        if (rec.has_d_hat) out << format_full(rec.d_hat[k]);
        out << ',';
        if (rec.has_p_hat) out << format_full(rec.p_hat[k]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("export_csv: write failed for " + path.string());
}

MetricsReport metrics_from_csv(const std::filesystem::path& path,
                               std::span<const double> theta_true, std::optional<double> p_true,
                               std::optional<double> d_bound_bar) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("metrics_from_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("metrics_from_csv: empty file");
    const std::vector<std::string> header = split_csv_line(line);
    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw std::runtime_error("metrics_from_csv: missing column " + name);
    };
    const std::size_t c_t = column("t");
    const std::size_t c_eps = column("eps");
    const std::size_t c_u = column("u");
    const std::size_t c_d = column("D_hat");
    const std::size_t c_p = column("p_hat");
    std::vector<std::size_t> c_theta(theta_true.size());
    for (std::size_t j = 0; j < theta_true.size(); ++j)
        c_theta[j] = column("theta_hat_" + std::to_string(j + 1));

    MetricsReport rep;
    double eps_sq = 0.0, u_sq = 0.0, th_sq = 0.0, d_sq = 0.0, p_sq = 0.0;
    double t_first = 0.0, t_second = 0.0, t_last = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const double e = std::stod(cells[c_eps]);
        rep.eps_max = std::max(rep.eps_max, std::abs(e));
        eps_sq += e * e;
        const double u = std::stod(cells[c_u]);
        u_sq += u * u;
        double s = 0.0;
        for (std::size_t j = 0; j < theta_true.size(); ++j) {
            const double d = theta_true[j] - std::stod(cells[c_theta[j]]);
            s += d * d;
        }
        th_sq += s;
        if (d_bound_bar && !cells[c_d].empty()) {
            const double d = *d_bound_bar - std::stod(cells[c_d]);
            d_sq += d * d;
        }
        if (p_true && !cells[c_p].empty()) {
            const double d = *p_true - std::stod(cells[c_p]);
            p_sq += d * d;
        }
        const double t = std::stod(cells[c_t]);
        if (rows == 0) t_first = t;
        if (rows == 1) t_second = t;
        t_last = t;
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("metrics_from_csv: no data rows");
    rep.eps_l2 = std::sqrt(eps_sq);
    rep.u_l2 = std::sqrt(u_sq);
    rep.theta_err_l2 = std::sqrt(th_sq);
    if (d_bound_bar) rep.d_err_l2 = std::sqrt(d_sq);
    if (p_true) rep.p_err_l2 = std::sqrt(p_sq);
    rep.h = rows > 1 ? t_second - t_first : 0.0;
    rep.horizon = t_last;
    return rep;
}

}  // namespace focs
