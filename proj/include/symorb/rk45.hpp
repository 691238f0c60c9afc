#pragma once

// Dormand-Prince 5(4) stepper with PI step-size control and the pair's
// 4th-order continuous extension. Header-only so it can be instantiated for
// the full 4-dimensional systems, the reduced collision-manifold field and
// the scalar comparison ODEs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace symorb::rk45 {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double hmax = std::numeric_limits<double>::infinity();
  double h0 = 0.0;          // 0 selects the initial step automatically
  double fixed_step = 0.0;  // > 0 disables error control
};

/// Continuous extension over one accepted step [s0, s0 + h].
template <std::size_t N>
struct DenseStep {
  double s0 = 0.0, h = 0.0;
  Vec<N> c1{}, c2{}, c3{}, c4{}, c5{};

  Vec<N> operator()(double s) const {
    const double t = (s - s0) / h, t1 = 1.0 - t;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = c1[i] + t * (c2[i] + t1 * (c3[i] + t * (c4[i] + t1 * c5[i])));
    return y;
  }
};

enum class StepStatus { accepted, underflow, non_finite };

template <std::size_t N, class Field>
class Stepper {
 public:
  Stepper(Field field, StepControl ctl) : f_(std::move(field)), ctl_(ctl) {}

  void init(double s, const Vec<N>& y) {
    s_ = s;
    y_ = y;
    k1_ = f_(y_);
    facold_ = 1e-4;
    last_rejected_ = false;
    h_ = ctl_.fixed_step > 0 ? ctl_.fixed_step : (ctl_.h0 > 0 ? ctl_.h0 : initial_step());
    h_ = std::min(h_, ctl_.hmax);
  }

  double s() const { return s_; }
  const Vec<N>& y() const { return y_; }
  double proposed_step() const { return h_; }
  long rejected() const { return rejected_; }
  const DenseStep<N>& dense() const { return dense_; }
  const Vec<N>& y_prev() const { return yprev_; }
  double s_prev() const { return sprev_; }

  /// Attempts steps until one is accepted, never stepping beyond s_end.
  StepStatus advance(double s_end) {
    for (;;) {
      double h = std::min(h_, s_end - s_);
      const double hmin = 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s_));
      if (!(h > hmin) && s_end - s_ > hmin) return StepStatus::underflow;
      if (h <= 0) h = s_end - s_;
      Vec<N> y1, k7, err;
      stages(s_, y_, k1_, h, y1, k7, &err);
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) finite = finite && std::isfinite(y1[i]) && std::isfinite(k7[i]);
      if (ctl_.fixed_step > 0) {
        if (!finite) return StepStatus::non_finite;
        commit(h, y1, k7);
        return StepStatus::accepted;
      }
      double e = std::numeric_limits<double>::infinity();
      if (finite) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y_[i]), std::abs(y1[i]));
          acc += (err[i] / sc) * (err[i] / sc);
        }
        e = std::sqrt(acc / N);
      }
      constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
      constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
      if (e <= 1.0) {
        const double fac11 = std::pow(e, expo1);
        double fac = fac11 / std::pow(facold_, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        facold_ = std::max(e, 1e-4);
        double hnew = h / fac;
        if (last_rejected_) hnew = std::min(hnew, h);
        last_rejected_ = false;
        commit(h, y1, k7);
        h_ = std::min(hnew, ctl_.hmax);
        return StepStatus::accepted;
      }
      const double fac11 = std::isfinite(e) ? std::pow(e, expo1) : facc1 * safe;
      h_ = h / std::min(facc1, fac11 / safe);
      last_rejected_ = true;
      ++rejected_;
      if (!(h_ > hmin)) return StepStatus::underflow;
    }
  }

  /// One 5th-order step from the start of the last accepted step to s,
  /// used to polish event locations beyond interpolant accuracy.
  Vec<N> exact_from_prev(double s) const {
    Vec<N> y1, k7;
    stages(sprev_, yprev_, kprev_, s - sprev_, y1, k7, nullptr);
    return y1;
  }

 private:
  void stages(double, const Vec<N>& y, const Vec<N>& k1, double h, Vec<N>& y1, Vec<N>& k7,
              Vec<N>* err) const {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    Vec<N> t;
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * a21 * k1[i];
    const Vec<N> k2 = f_(t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec<N> k3 = f_(t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec<N> k4 = f_(t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec<N> k5 = f_(t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const Vec<N> k6 = f_(t);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f_(y1);
    if (err) {
      for (std::size_t i = 0; i < N; ++i)
        (*err)[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    if (err) {
      // keep stages for the dense output of the step being evaluated
      k3_ = k3;
      k4_ = k4;
      k5_ = k5;
      k6_ = k6;
    }
  }

  void commit(double h, const Vec<N>& y1, const Vec<N>& k7) {
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
    dense_.s0 = s_;
    dense_.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      dense_.c1[i] = y_[i];
      dense_.c2[i] = ydiff;
      dense_.c3[i] = bspl;
      dense_.c4[i] = ydiff - h * k7[i] - bspl;
      dense_.c5[i] =
          h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7[i]);
    }
    sprev_ = s_;
    yprev_ = y_;
    kprev_ = k1_;
    s_ += h;
    y_ = y1;
    k1_ = k7;
  }

  double initial_step() const {
    // Hairer's starting-step heuristic.
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = ctl_.atol + ctl_.rtol * std::abs(y_[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, ctl_.hmax);
    Vec<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h * k1_[i];
    const Vec<N> f1 = f_(y1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = ctl_.atol + ctl_.rtol * std::abs(y_[i]);
      der2 += ((f1[i] - k1_[i]) / sk) * ((f1[i] - k1_[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100 * h, h1, ctl_.hmax});
  }

  Field f_;
  StepControl ctl_;
  double s_ = 0.0, sprev_ = 0.0, h_ = 0.0, facold_ = 1e-4;
  bool last_rejected_ = false;
  long rejected_ = 0;
  Vec<N> y_{}, k1_{}, yprev_{}, kprev_{};
  mutable Vec<N> k3_{}, k4_{}, k5_{}, k6_{};
  DenseStep<N> dense_;
};

template <std::size_t N, class Field>
Stepper<N, Field> make_stepper(Field f, StepControl ctl) {
  return Stepper<N, Field>(std::move(f), ctl);
}

}  // namespace symorb::rk45
