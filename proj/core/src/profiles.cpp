#include "blkit/profiles.hpp"

#include "blkit/errors.hpp"
#include "blkit/fd.hpp"
#include "blkit/linsolve.hpp"

#include <algorithm>
#include <cmath>

namespace blkit {

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double t2 = t * t;
    return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}
double smoothstep_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double t2 = t * t;
    return t2 * t * (140.0 - 420.0 * t + 420.0 * t2 - 140.0 * t2 * t);
}
double smoothstep_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double t2 = t * t;
    return t2 * (420.0 - 1680.0 * t + 2100.0 * t2 - 840.0 * t2 * t);
}
double smoothstep_d3(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return t * (840.0 - 5040.0 * t + 8400.0 * t * t - 4200.0 * t * t * t);
}

double smoothstep_d4(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 840.0 - 10080.0 * t + 25200.0 * t * t - 16800.0 * t * t * t;
}
namespace {
// int_0^t S7
double smoothstep_int(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 0.5 + (t - 1.0);
    const double t2 = t * t;
    return t2 * t2 * t * (7.0 - 14.0 * t + 10.0 * t2 - 2.5 * t2 * t);
}
} // namespace

double Cutoff::value(double y) const { return 1.0 - smoothstep((y - lo) / (hi - lo)); }
double Cutoff::d1(double y) const {
    const double w = hi - lo;
    return -smoothstep_d1((y - lo) / w) / w;
}
double Cutoff::d2(double y) const {
    const double w = hi - lo;
    return -smoothstep_d2((y - lo) / w) / (w * w);
}
double Cutoff::d3(double y) const {
    const double w = hi - lo;
    return -smoothstep_d3((y - lo) / w) / (w * w * w);
}
Profile Cutoff::sample(const Grid1D& g) const {
    Profile out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = value(g.nodes[i]);
    return out;
}

double PolyExp::value(double y) const {
    double s = 0.0;
    for (const Term& t : terms) s += t.c * std::pow(y, t.p) * std::exp(-t.r * y);
    return s;
}

PolyExp PolyExp::differentiated(int order) const {
    PolyExp cur = *this;
    for (int k = 0; k < order; ++k) {
        PolyExp next;
        for (const Term& t : cur.terms) {
            if (t.p > 0) next.terms.push_back({t.c * t.p, t.p - 1, t.r});
            if (t.r != 0.0) next.terms.push_back({-t.c * t.r, t.p, t.r});
        }
        cur = std::move(next);
    }
    return cur;
}

double PolyExp::deriv(double y, int order) const { return differentiated(order).value(y); }

PolyExp PolyExp::scaled(double s) const {
    PolyExp out = *this;
    for (Term& t : out.terms) t.c *= s;
    return out;
}

PolyExp PolyExp::plus(const PolyExp& other) const {
    PolyExp out = *this;
    out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
    return out;
}

Profile PolyExp::sample(std::span<const double> nodes) const {
    Profile out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = value(nodes[i]);
    return out;
}

Profile InitialProfile::sample(const Grid1D& g) const {
    Profile out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = value(g.nodes[i]);
    return out;
}

namespace {

// Normalized quartic-power bump 256 (t(1-t))^4 with unit peak.
double bump_shape_d(double t, int k) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    static const double c[9] = {0, 0, 0, 0, 256, -1024, 1536, -1024, 256};
    double s = 0.0;
    for (int p = 4; p <= 8; ++p) {
        if (p - k < 0) continue;
        double f = c[p];
        for (int j = 0; j < k; ++j) f *= (p - j);
        s += f * std::pow(t, p - k);
    }
    return s;
}
// int_0^t 256 (u(1-u))^4 du
double bump_int(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 256.0 / 630.0;
    const double t5 = std::pow(t, 5);
    return 256.0 * t5 * (1.0 / 5.0 - (2.0 / 3.0) * t + (6.0 / 7.0) * t * t - 0.5 * t * t * t +
                         (1.0 / 9.0) * t * t * t * t);
}

class PlateauShear final : public InitialProfile {
public:
    explicit PlateauShear(double A) : A_(A) {
        s0_ = 1.0 / (y1_ + (y2_ - y1_) * (1.0 + A_ * 256.0 / 630.0) + 0.5 * (y3_ - y2_));
    }

    double value(double y) const override {
        if (y <= y1_) return s0_ * y;
        if (y <= y2_) {
            const double w = y2_ - y1_;
            const double t = (y - y1_) / w;
            return s0_ * (y1_ + (y - y1_) + A_ * w * bump_int(t));
        }
        if (y < y3_) {
            const double w = y3_ - y2_;
            const double t = (y - y2_) / w;
            const double base = y1_ + (y2_ - y1_) * (1.0 + A_ * 256.0 / 630.0);
            return s0_ * (base + (y - y2_) - w * smoothstep_int(t));
        }
        return 1.0;
    }

    double deriv(double y, int order) const override {
        if (order < 1 || order > 4) throw ConfigError("InitialProfile::deriv: order must be 1..4");
        const int k = order - 1; // derivative order of phi
        if (y <= y1_) return k == 0 ? s0_ : 0.0;
        if (y >= y3_) return 0.0;
        if (y <= y2_) {
            const double w = y2_ - y1_;
            const double t = (y - y1_) / w;
            if (k == 0) return s0_ * (1.0 + A_ * bump_shape_d(t, 0));
            return s0_ * A_ * bump_shape_d(t, k) / std::pow(w, k);
        }
        const double w = y3_ - y2_;
        const double t = (y - y2_) / w;
        if (k == 0) return s0_ * (1.0 - smoothstep(t));
        const double d = (k == 1)   ? smoothstep_d1(t)
                         : (k == 2) ? smoothstep_d2(t)
                                    : smoothstep_d3(t);
        return -s0_ * d / std::pow(w, k);
    }

    std::string name() const override { return "plateau_shear"; }

private:
    double A_;
    double y1_ = 1.0, y2_ = 2.2, y3_ = 4.4;
    double s0_ = 0.0;
};

class SmoothedTanh final : public InitialProfile {
public:
    explicit SmoothedTanh(double a) : a_(a) {}

    double value(double y) const override { return std::tanh(a_ * y) + corr(y, 0); }
    double deriv(double y, int order) const override { return tanh_d(y, order) + corr(y, order); }
    std::string name() const override { return "smoothed_tanh"; }

private:
    double tanh_d(double y, int k) const {
        const double t = std::tanh(a_ * y);
        const double s = 1.0 - t * t;
        switch (k) {
            case 1: return a_ * s;
            case 2: return -2.0 * a_ * a_ * s * t;
            case 3: return a_ * a_ * a_ * s * (6.0 * t * t - 2.0);
            case 4: return a_ * a_ * a_ * a_ * s * t * (16.0 - 24.0 * t * t);
            default: throw ConfigError("deriv order must be 1..4");
        }
    }
    // (a^3/3) y^3 m(y) with m = 1 - S7((y - w)/w), w = 0.25: removes tanh'''(0).
    double corr(double y, int k) const {
        const double w = 0.25;
        if (y >= 2.0 * w) return 0.0;
        const double c = a_ * a_ * a_ / 3.0;
        auto md = [&](int j) -> double {
            const double t = (y - w) / w;
            if (j == 0) return 1.0 - smoothstep(t);
            double d;
            switch (j) {
                case 1: d = smoothstep_d1(t); break;
                case 2: d = smoothstep_d2(t); break;
                case 3: d = smoothstep_d3(t); break;
                default: d = smoothstep_d4(t); break;
            }
            return -d / std::pow(w, j);
        };
        auto y3d = [&](int j) -> double {
            switch (j) {
                case 0: return y * y * y;
                case 1: return 3.0 * y * y;
                case 2: return 6.0 * y;
                case 3: return 6.0;
                default: return 0.0;
            }
        };
        static const int binom[5][5] = {
            {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += binom[k][j] * y3d(j) * md(k - j);
        return c * s;
    }

    double a_;
};

class Tabulated final : public InitialProfile {
public:
    Tabulated(Profile values, Grid1D grid) : values_(std::move(values)), grid_(std::move(grid)) {
        if (values_.size() != grid_.size()) throw ConfigError("tabulated profile: size mismatch");
        for (int k = 1; k <= 4; ++k) derivs_[k - 1] = differentiate(values_, grid_.nodes, k);
    }
    double value(double y) const override { return lerp_at(values_, y); }
    double deriv(double y, int order) const override {
        if (order < 1 || order > 4) throw ConfigError("deriv order must be 1..4");
        return lerp_at(derivs_[order - 1], y);
    }
    std::string name() const override { return "tabulated"; }

private:
    double lerp_at(const Profile& f, double y) const {
        const auto& xs = grid_.nodes;
        if (y <= xs.front()) return f.front();
        if (y >= xs.back()) return f.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double t = (y - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - t) * f[i] + t * f[i + 1];
    }
    Profile values_;
    Grid1D grid_;
    Profile derivs_[4];
};

} // namespace

std::unique_ptr<InitialProfile> make_plateau_shear(double bump_amplitude) {
    return std::make_unique<PlateauShear>(bump_amplitude);
}
std::unique_ptr<InitialProfile> make_smoothed_tanh(double a) {
    return std::make_unique<SmoothedTanh>(a);
}
std::unique_ptr<InitialProfile> make_tabulated_profile(Profile values, Grid1D grid) {
    return std::make_unique<Tabulated>(std::move(values), std::move(grid));
}

Profile divide_by_y(const Profile& g, std::span<const double> nodes, int m,
                    double y_star, double y_fit) {
    const std::size_t n = g.size();
    Profile out(n, 0.0);

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (nodes[i] > 0.0 && nodes[i] <= y_fit) idx.push_back(i);
    // Coarse grids: widen the fit window until it holds enough nodes.
    while (idx.size() < 8 && y_fit < 0.45 * nodes.back()) {
        y_fit *= 1.5;
        idx.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (nodes[i] > 0.0 && nodes[i] <= y_fit) idx.push_back(i);
    }
    if (idx.size() < 6) throw ConfigError("divide_by_y: too few near-wall nodes");

    const int nc = 5; // fit g ~ sum_{j=m}^{m+4} c_j y^j
    DenseMatrix ata(nc);
    std::vector<double> atb(nc, 0.0);
    for (std::size_t i : idx) {
        double basis[5];
        basis[0] = std::pow(nodes[i], m);
        for (int j = 1; j < nc; ++j) basis[j] = basis[j - 1] * nodes[i];
        for (int r = 0; r < nc; ++r) {
            atb[r] += basis[r] * g[i];
            for (int c = 0; c < nc; ++c) ata.at(r, c) += basis[r] * basis[c];
        }
    }
    const std::vector<double> coef = solve_linear(std::move(ata), std::move(atb));

    const double blend_lo = y_star, blend_hi = 2.0 * y_star;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = nodes[i];
        const double fit = coef[0] + y * (coef[1] + y * (coef[2] + y * (coef[3] + y * coef[4])));
        const double direct = y > 0.0 ? g[i] / std::pow(y, m) : fit;
        if (y <= blend_lo) {
            out[i] = fit;
        } else if (y >= blend_hi) {
            out[i] = direct;
        } else {
            const double w = smoothstep((y - blend_lo) / (blend_hi - blend_lo));
            out[i] = (1.0 - w) * fit + w * direct;
        }
    }
    return out;
}

Profile divide_by_ubar(const Profile& g, const Profile& ubar, std::span<const double> nodes) {
    Profile gy = divide_by_y(g, nodes, 1);
    Profile uy = divide_by_y(ubar, nodes, 1);
    Profile out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = gy[i] / uy[i];
    return out;
}

} // namespace blkit
