#include "nilflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nilflow/errors.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

// Smooth window on [0,1] with unit integral, C^7 across the seam when the
// lifted character wraps in the flow coordinate.
inline double window1(double t) {
    double s = std::sin(M_PI * t);
    double s2 = s * s;
    double s4 = s2 * s2;
    return (128.0 / 35.0) * s4 * s4;
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

}  // namespace

Rectangle::Rectangle(Eigen::VectorXd t, GroupElement m) : sides(std::move(t)), base(std::move(m)) {
    if (sides.size() < 1) throw std::invalid_argument("Rectangle: rank must be >= 1");
    for (int i = 0; i < sides.size(); ++i)
        if (!(sides[i] > 0.0)) throw std::invalid_argument("Rectangle: all side lengths must be > 0");
}

Observable::Observable(int g, double K) : g_(g), K_(K) {
    if (g < 1) throw std::invalid_argument("Observable: g must be >= 1");
    if (!(K > 0.0)) throw std::invalid_argument("Observable: K must be > 0");
}

void Observable::add_term(Eigen::VectorXi m, int n, std::complex<double> coefficient) {
    if (m.size() != g_) throw std::invalid_argument("Observable: label length must equal g");
    if (!std::isfinite(coefficient.real()) || !std::isfinite(coefficient.imag()))
        throw std::invalid_argument("Observable: coefficient must be finite");
    if (n != 0 && (K_ != std::round(K_) || std::llround(K_) % 2 != 0))
        throw std::invalid_argument(
            "Observable: central terms need an even integer K to be well-defined on the manifold");
    terms_.push_back(Term{std::move(m), n, coefficient});
}

bool Observable::has_zero_mean() const {
    for (const auto& t : terms_)
        if (t.n == 0 && t.m.isZero()) return false;
    return true;
}

bool Observable::has_central_terms() const {
    for (const auto& t : terms_)
        if (t.n != 0) return true;
    return false;
}

std::complex<double> Observable::evaluate(const GroupElement& reduced) const {
    double win = -1.0;  // computed lazily
    double zeta = 0.0;
    bool zeta_ready = false;
    std::complex<double> acc(0.0, 0.0);
    for (const auto& t : terms_) {
        double my = 0.0;
        for (int k = 0; k < g_; ++k) my += t.m[k] * reduced.y[k];
        if (t.n == 0) {
            acc += t.coefficient * unit_phase(my);
            continue;
        }
        if (!zeta_ready) {
            zeta = reduced.z - reduced.x.dot(reduced.y);
            zeta_ready = true;
        }
        if (win < 0.0) {
            win = 1.0;
            for (int k = 0; k < g_; ++k) win *= window1(reduced.x[k]);
        }
        acc += t.coefficient * win * unit_phase(my + t.n * K_ * zeta);
    }
    return acc;
}

std::complex<double> Observable::evaluate_torus(const Eigen::VectorXd& y, double z) const {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& t : terms_) {
        double my = 0.0;
        for (int k = 0; k < g_; ++k) my += t.m[k] * y[k];
        acc += t.coefficient * unit_phase(my + t.n * K_ * z);
    }
    return acc;
}

GroupElement flow(const Frame& frame, const GroupElement& m, const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size());
    if (d < 1 || d > frame.g) throw std::invalid_argument("flow: need 1 <= d <= g");
    if (m.rank() != frame.g) throw std::invalid_argument("flow: basepoint rank mismatch");
    Eigen::VectorXd a = frame.coeffs.topRows(d).leftCols(frame.g).transpose() * x;
    Eigen::VectorXd b = frame.coeffs.topRows(d).rightCols(frame.g).transpose() * x;
    GroupElement u(a, b, 0.5 * a.dot(b));
    return lattice_reduce(multiply(u, m));
}

GroupElement flow(const SymplecticMatrix& alpha, const GroupElement& m, const Eigen::VectorXd& x) {
    return flow(frame_transform(alpha), m, x);
}

namespace {

// Midpoint-rule integrand: reduced coordinates of exp(sum s_i X_i^alpha) m
// followed by observable evaluation, with no per-node allocation.
class FlowIntegrand {
  public:
    FlowIntegrand(const Frame& frame, const GroupElement& base, const Observable& f, int d)
        : g_(frame.g),
          d_(d),
          ax_(frame.coeffs.topRows(d).leftCols(frame.g)),
          bx_(frame.coeffs.topRows(d).rightCols(frame.g)),
          base_(lattice_reduce(base)),
          f_(f),
          xa_(frame.g),
          xb_(frame.g),
          px_(frame.g),
          py_(frame.g),
          pt_(GroupElement::identity(frame.g)) {}

    std::complex<double> operator()(const Eigen::VectorXd& s) {
        xa_.noalias() = ax_.transpose() * s;
        xb_.noalias() = bx_.transpose() * s;
        // (xa, xb, xa.xb/2) * base, then right lattice reduction
        double pz = 0.5 * xa_.dot(xb_) + base_.z + xa_.dot(base_.y);
        px_ = xa_ + base_.x;
        py_ = xb_ + base_.y;
        double zc = pz;
        for (int k = 0; k < g_; ++k) {
            double q = -std::floor(py_[k]);
            zc += px_[k] * q;
            pt_.y[k] = mod_unit(py_[k] + q);
            pt_.x[k] = mod_unit(px_[k]);
        }
        pt_.z = mod_window(zc, 0.5);
        return f_.evaluate(pt_);
    }

    // Largest phase rate of the integrand along axis i, used to size panels.
    double rate(int i) const {
        double row_b = bx_.row(i).cwiseAbs().sum();
        double row_a = ax_.row(i).cwiseAbs().sum();
        double worst = 0.0;
        for (const auto& t : f_.terms()) {
            double r = 0.0;
            for (int k = 0; k < g_; ++k) r += std::abs(static_cast<double>(t.m[k])) * std::abs(bx_(i, k));
            if (t.n != 0) r += std::abs(static_cast<double>(t.n)) * f_.central_parameter() * row_b;
            worst = std::max(worst, r);
        }
        double rate = kTwoPi * worst;
        if (f_.has_central_terms()) rate += 8.0 * M_PI * row_a;
        return rate;
    }

  private:
    int g_, d_;
    Eigen::MatrixXd ax_, bx_;  // d x g
    GroupElement base_;
    const Observable& f_;
    Eigen::VectorXd xa_, xb_, px_, py_;
    GroupElement pt_;
};

std::complex<double> midpoint_tensor(FlowIntegrand& f, const Eigen::VectorXd& sides,
                                     const std::vector<long long>& n, long long* evals) {
    const int d = static_cast<int>(sides.size());
    Eigen::VectorXd h(d);
    long long total = 1;
    for (int i = 0; i < d; ++i) {
        h[i] = sides[i] / static_cast<double>(n[static_cast<size_t>(i)]);
        total *= n[static_cast<size_t>(i)];
    }
    *evals += total;
    KahanComplexSum acc;
    Eigen::VectorXd s(d);
    std::vector<long long> idx(static_cast<size_t>(d), 0);
    for (long long c = 0; c < total; ++c) {
        for (int i = 0; i < d; ++i) s[i] = (idx[static_cast<size_t>(i)] + 0.5) * h[i];
        acc.add(f(s));
        int i = 0;
        while (i < d && ++idx[static_cast<size_t>(i)] >= n[static_cast<size_t>(i)])
            idx[static_cast<size_t>(i++)] = 0;
    }
    double vol_h = 1.0;
    for (int i = 0; i < d; ++i) vol_h *= h[i];
    return acc.value() * vol_h;
}

}  // namespace

BirkhoffResult birkhoff_integral_detailed(const SymplecticMatrix& alpha, const GroupElement& m,
                                          const Eigen::VectorXd& sides, const Observable& f,
                                          const QuadratureSpec& spec) {
    const int d = static_cast<int>(sides.size());
    if (d < 1 || d > alpha.g) throw std::invalid_argument("birkhoff_integral: need 1 <= d <= g");
    if (f.genus() != alpha.g) throw std::invalid_argument("birkhoff_integral: observable genus mismatch");
    if (m.rank() != alpha.g) throw std::invalid_argument("birkhoff_integral: basepoint rank mismatch");
    for (int i = 0; i < d; ++i)
        if (!(sides[i] > 0.0)) throw std::invalid_argument("birkhoff_integral: sides must be positive");
    if (spec.min_points_per_unit < 2)
        throw std::invalid_argument("birkhoff_integral: resolution must be >= 2 points per unit length");

    Frame frame = frame_transform(alpha);
    FlowIntegrand integrand(frame, m, f, d);

    std::vector<long long> n(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        double rate = integrand.rate(i);
        double per_unit = std::max(static_cast<double>(spec.min_points_per_unit), rate / 1.5);
        n[static_cast<size_t>(i)] =
            std::max<long long>(1, static_cast<long long>(std::ceil(sides[i] * per_unit)));
    }

    long long evals = 0;
    std::complex<double> coarse = midpoint_tensor(integrand, sides, n, &evals);
    for (int level = 0;; ++level) {
        long long next_cost = 1;
        for (auto& k : n) next_cost *= 2 * k;
        if (evals + next_cost > spec.max_evals)
            throw ToleranceNotMetError("birkhoff_integral: budget exceeded before tolerance met",
                                       coarse, coarse);
        for (auto& k : n) k *= 2;
        std::complex<double> fine = midpoint_tensor(integrand, sides, n, &evals);
        std::complex<double> value = (4.0 * fine - coarse) / 3.0;
        double est = std::abs(fine - coarse) / 3.0;
        if (est <= spec.abs_tol + spec.rel_tol * std::abs(value) || level >= 24)
            return BirkhoffResult{value, est, evals};
        coarse = fine;
    }
}

std::complex<double> birkhoff_integral(const SymplecticMatrix& alpha, const GroupElement& m,
                                       const Eigen::VectorXd& sides, const Observable& f,
                                       const QuadratureSpec& spec) {
    return birkhoff_integral_detailed(alpha, m, sides, f, spec).value;
}

SkewShift return_map(const SymplecticMatrix& alpha, int d, double K) {
    const int g = alpha.g;
    if (d < 1 || d > g) throw std::invalid_argument("return_map: need 1 <= d <= g");
    if (!(K > 0.0) || K != std::round(K))
        throw std::invalid_argument("return_map: K must be a positive integer");
    Frame frame = frame_transform(alpha);
    Eigen::MatrixXd af = frame.block_a();
    Eigen::MatrixXd bf = frame.block_b();

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(af);
    double adet = std::abs(lu.determinant());
    if (adet < 1e-12)
        throw DegenerateFrameError("return_map: frame X-block is singular");
    Eigen::MatrixXd ainv = lu.inverse();

    // Shear matrix of the section transfer; symmetric exactly when the
    // generators commute, so symmetrize once and keep the defect at zero.
    Eigen::MatrixXd s = bf.transpose() * ainv.transpose();
    double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff()))
        throw DegenerateFrameError("return_map: shear matrix lost symmetry (frame not symplectic?)");
    s = 0.5 * (s + s.transpose().eval());

    SkewShift shift;
    shift.g = g;
    shift.d = d;
    shift.K = K;
    shift.rho.resize(d, g);
    shift.v = Eigen::MatrixXd::Zero(d, g);
    shift.tau.resize(d);
    shift.t_ret.resize(d);
    const double zp = 1.0 / K;
    for (int i = 0; i < d; ++i) {
        double diag = ainv(i, i);
        if (std::abs(diag) < 1e-12)
            throw DegenerateFrameError("return_map: <X_i^alpha, X_i> return component vanishes");
        double sigma = diag > 0.0 ? 1.0 : -1.0;
        shift.t_ret[i] = std::abs(diag);
        shift.v(i, i) = sigma;
        for (int k = 0; k < g; ++k) shift.rho(i, k) = mod_unit(sigma * s(k, i));
        shift.tau[i] = mod_window(0.5 * s(i, i), zp);
    }
    return shift;
}

TorusPoint skew_iterate(const SkewShift& shift, const TorusPoint& p, const Eigen::VectorXi& j) {
    const int g = shift.g;
    const int d = shift.d;
    if (p.y.size() != g) throw std::invalid_argument("skew_iterate: point dimension mismatch");
    if (j.size() != d) throw std::invalid_argument("skew_iterate: iterate vector must have length d");
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < g; ++k)
            if (!near_integer(shift.K * shift.v(i, k), 1e-9))
                throw std::invalid_argument(
                    "skew_iterate: K*v must be integral for a well-defined torus map");

    const double zp = shift.z_period();
    TorusPoint out;
    out.y = p.y;
    for (int k = 0; k < g; ++k) {
        KahanSum yk;
        yk.add(mod_unit(p.y[k]));
        for (int i = 0; i < d; ++i) yk.add(frac_prod(static_cast<double>(j[i]), shift.rho(i, k)));
        out.y[k] = mod_unit(yk.value());
    }

    // z-part: sum_i [ j_i tau_i + v_i.(j_i y + rho_i C(j_i,2)) ]
    //         + sum_{k<i} j_i j_k v_i.rho_k, reduced mod 1/K.
    KahanSum zacc;
    zacc.add(mod_window(p.z, zp));
    for (int i = 0; i < d; ++i) {
        const double ji = static_cast<double>(j[i]);
        zacc.add(frac_prod(ji, shift.tau[i]));
        double viy = shift.v.row(i).dot(p.y);
        zacc.add(frac_prod(ji, mod_unit(viy)));
        double virho = shift.v.row(i).dot(shift.rho.row(i));
        double comb = 0.5 * ji * (ji - 1.0);  // exact for |j| <= ~9e7
        zacc.add(frac_prod(comb, virho));
        for (int k = 0; k < i; ++k) {
            double virhok = shift.v.row(i).dot(shift.rho.row(k));
            zacc.add(frac_prod(ji * static_cast<double>(j[k]), virhok));
        }
    }
    out.z = mod_window(mod_unit(zacc.value()), zp);
    return out;
}

Eigen::VectorXd return_time(const SymplecticMatrix& alpha, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& t_x, const Eigen::VectorXd* y_x) {
    const int g = alpha.g;
    if (y.size() != g || t_x.size() != g)
        throw std::invalid_argument("return_time: expected g-vectors");
    Frame frame = frame_transform(alpha);
    Eigen::MatrixXd af = frame.block_a();
    if (std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(af).determinant()) < 1e-12)
        throw DegenerateFrameError("return_time: frame X-block is singular (det A = 0)");
    Eigen::VectorXd dy = y;
    if (y_x != nullptr) {
        if (y_x->size() != g) throw std::invalid_argument("return_time: y_x must be a g-vector");
        dy -= *y_x;
    }
    return frame.block_d() * t_x + frame.block_c() * dy;
}

}  // namespace nilflow
