#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace revlab {

// Dense polynomial in monomial coefficients, lowest degree first.  Used for
// the closed-form profile blends; degrees stay small (< 32).
class Poly {
public:
    Poly() : c_{0.0} {}
    Poly(std::initializer_list<double> c) : c_(c) { if (c_.empty()) c_ = {0.0}; }
    explicit Poly(std::vector<double> c) : c_(std::move(c)) { if (c_.empty()) c_ = {0.0}; }

    static Poly constant(double v) { return Poly({v}); }
    static Poly monomial(std::size_t deg, double coeff) {
        std::vector<double> c(deg + 1, 0.0);
        c[deg] = coeff;
        return Poly(std::move(c));
    }

    std::size_t degree() const { return c_.size() - 1; }
    const std::vector<double>& coeffs() const { return c_; }

    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
        return v;
    }

    Poly derivative() const {
        if (c_.size() == 1) return Poly({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Poly(std::move(d));
    }

    // Antiderivative with zero constant term.
    Poly antiderivative() const {
        std::vector<double> a(c_.size() + 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
        return Poly(std::move(a));
    }

    Poly operator+(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r));
    }

    Poly operator-(const Poly& o) const { return *this + (o * -1.0); }

    Poly operator*(double s) const {
        std::vector<double> r(c_);
        for (auto& v : r) v *= s;
        return Poly(std::move(r));
    }

    Poly operator*(const Poly& o) const {
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }

    // p(a + b*x) as a polynomial in x.
    Poly compose_affine(double a, double b) const {
        Poly x{a, b};
        Poly r = Poly::constant(c_.back());
        for (std::size_t i = c_.size() - 1; i-- > 0;) r = r * x + Poly::constant(c_[i]);
        return r;
    }

    // Exact integral over [0, 1].
    double integral01() const {
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] / static_cast<double>(i + 1);
        return s;
    }

private:
    std::vector<double> c_;
};

// C^2-flat quintic smoothstep: S(0)=0, S(1)=1, S'=S''=0 at both ends.
inline Poly smoothstep_quintic() { return Poly({0.0, 0.0, 0.0, 10.0, -15.0, 6.0}); }

}  // namespace revlab
