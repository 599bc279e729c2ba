#include "tvn/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tvn {

template <int N>
JetVec3<N> radial_direction(double theta, double phi) {
  const Jet<N> th = Jet<N>::theta(theta);
  const Jet<N> ph = Jet<N>::phi(phi);
  const Jet<N> st = sin(th);
  return {st * cos(ph), st * sin(ph), cos(th)};
}

template JetVec3<0> radial_direction<0>(double, double);
template JetVec3<1> radial_direction<1>(double, double);
template JetVec3<2> radial_direction<2>(double, double);
template JetVec3<3> radial_direction<3>(double, double);

JetVec3<2> normal_jet(const ChartJet& chart) {
  const JetVec3<2> xt = d_theta(chart.x);
  const JetVec3<2> xp = d_phi(chart.x);
  JetVec3<2> c = cross(xt, xp);
  if (value_of(c).dot(value_of(chart.x)) < 0.0) c = -1.0 * c;
  return normalized(c);
}

namespace {

template <int N>
JetVec3<3> widen(const JetVec3<N>& a) {
  JetVec3<3> out;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < Jet<N>::kSize; ++i) out[k][i] = a[k][i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

class VectorField::Impl {
 public:
  virtual ~Impl() = default;
  virtual FieldJet evaluate(const ChartPoint& p) const = 0;
  virtual bool is_ambient() const { return false; }
  virtual Vec3 value(const Vec3&) const { throw std::logic_error("field is not ambient"); }
  virtual Mat3 jacobian(const Vec3&) const { throw std::logic_error("field is not ambient"); }
  virtual std::array<Mat3, 3> hessian(const Vec3&) const {
    throw std::logic_error("field is not ambient");
  }
  virtual std::string describe() const = 0;
};

namespace {

class AffineField final : public VectorField::Impl {
 public:
  AffineField(const Mat3& a, const Vec3& b, std::string name) : a_(a), b_(b), name_(std::move(name)) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    JetVec3<3> w = tvn::apply(a_, p.chart.x);
    for (int k = 0; k < 3; ++k) w[k] = w[k] + b_[k];
    return {w, p.chart.valid_order};
  }
  bool is_ambient() const override { return true; }
  Vec3 value(const Vec3& y) const override { return a_ * y + b_; }
  Mat3 jacobian(const Vec3&) const override { return a_; }
  std::array<Mat3, 3> hessian(const Vec3&) const override {
    return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  }
  std::string describe() const override { return name_; }

 private:
  Mat3 a_;
  Vec3 b_;
  std::string name_;
};

class TrigField final : public VectorField::Impl {
 public:
  explicit TrigField(std::vector<VectorField::TrigTerm> terms) : terms_(std::move(terms)) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    JetVec3<3> w;
    for (const auto& t : terms_) {
      Jet<3> arg(t.phase);
      for (int k = 0; k < 3; ++k) arg += p.chart.x[k] * t.frequency[k];
      const Jet<3> s = sin(arg);
      for (int k = 0; k < 3; ++k) w[k] += s * t.amplitude[k];
    }
    return {w, p.chart.valid_order};
  }
  bool is_ambient() const override { return true; }
  Vec3 value(const Vec3& y) const override {
    Vec3 v = Vec3::Zero();
    for (const auto& t : terms_) v += t.amplitude * std::sin(t.frequency.dot(y) + t.phase);
    return v;
  }
  Mat3 jacobian(const Vec3& y) const override {
    Mat3 j = Mat3::Zero();
    for (const auto& t : terms_)
      j += std::cos(t.frequency.dot(y) + t.phase) * t.amplitude * t.frequency.transpose();
    return j;
  }
  std::array<Mat3, 3> hessian(const Vec3& y) const override {
    std::array<Mat3, 3> h{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    for (const auto& t : terms_) {
      const double s = -std::sin(t.frequency.dot(y) + t.phase);
      const Mat3 ww = t.frequency * t.frequency.transpose();
      for (int k = 0; k < 3; ++k) h[k] += s * t.amplitude[k] * ww;
    }
    return h;
  }
  std::string describe() const override {
    return "trig" + std::to_string(terms_.size());
  }

 private:
  std::vector<VectorField::TrigTerm> terms_;
};

class RadialHarmonicField final : public VectorField::Impl {
 public:
  explicit RadialHarmonicField(HarmonicExpansion phi) : phi_(std::move(phi)) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    const Jet<3> f = phi_.evaluate<3>(p.theta, p.phi);
    return {f * radial_direction<3>(p.theta, p.phi), 3};
  }
  std::string describe() const override { return "radial_L" + std::to_string(phi_.degree()); }

 private:
  HarmonicExpansion phi_;
};

class NormalHarmonicField final : public VectorField::Impl {
 public:
  explicit NormalHarmonicField(HarmonicExpansion phi) : phi_(std::move(phi)) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    const Jet<2> f = phi_.evaluate<2>(p.theta, p.phi);
    return {widen(f * normal_jet(p.chart)), std::min(2, p.chart.valid_order - 1)};
  }
  std::string describe() const override { return "normal_L" + std::to_string(phi_.degree()); }

 private:
  HarmonicExpansion phi_;
};

class SurfaceNormalField final : public VectorField::Impl {
 public:
  FieldJet evaluate(const ChartPoint& p) const override {
    return {widen(normal_jet(p.chart)), std::min(2, p.chart.valid_order - 1)};
  }
  std::string describe() const override { return "n"; }
};

class TangentialField final : public VectorField::Impl {
 public:
  explicit TangentialField(VectorField inner) : inner_(std::move(inner)) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    const FieldJet in = inner_.evaluate(p);
    const JetVec3<2> n = normal_jet(p.chart);
    const JetVec3<2> w = truncate<2>(in.w);
    const JetVec3<2> t = w - dot(w, n) * n;
    return {widen(t), std::min({2, in.valid_order, p.chart.valid_order - 1})};
  }
  std::string describe() const override { return "tan(" + inner_.describe() + ")"; }

 private:
  VectorField inner_;
};

class SumField final : public VectorField::Impl {
 public:
  SumField(VectorField a, double sa, VectorField b, double sb)
      : a_(std::move(a)), b_(std::move(b)), sa_(sa), sb_(sb) {}
  FieldJet evaluate(const ChartPoint& p) const override {
    const FieldJet fa = a_.evaluate(p);
    const FieldJet fb = b_.evaluate(p);
    return {sa_ * fa.w + sb_ * fb.w, std::min(fa.valid_order, fb.valid_order)};
  }
  bool is_ambient() const override { return a_.is_ambient() && b_.is_ambient(); }
  Vec3 value(const Vec3& y) const override { return sa_ * a_.value(y) + sb_ * b_.value(y); }
  Mat3 jacobian(const Vec3& y) const override {
    return sa_ * a_.jacobian(y) + sb_ * b_.jacobian(y);
  }
  std::array<Mat3, 3> hessian(const Vec3& y) const override {
    auto ha = a_.hessian(y);
    const auto hb = b_.hessian(y);
    for (int k = 0; k < 3; ++k) ha[k] = sa_ * ha[k] + sb_ * hb[k];
    return ha;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << sa_ << "*" << a_.describe() << "+" << sb_ << "*" << b_.describe();
    return os.str();
  }

 private:
  VectorField a_, b_;
  double sa_, sb_;
};

}  // namespace

VectorField::VectorField() : VectorField(zero()) {}

VectorField VectorField::zero() {
  static const auto impl = std::make_shared<AffineField>(Mat3::Zero(), Vec3::Zero(), "zero");
  return VectorField(impl);
}

VectorField VectorField::constant(const Vec3& c) {
  return VectorField(std::make_shared<AffineField>(Mat3::Zero(), c, "const"));
}

VectorField VectorField::affine(const Mat3& a, const Vec3& b) {
  return VectorField(std::make_shared<AffineField>(a, b, "affine"));
}

VectorField VectorField::trigonometric(std::vector<TrigTerm> terms) {
  return VectorField(std::make_shared<TrigField>(std::move(terms)));
}

VectorField VectorField::radial_harmonic(HarmonicExpansion phi) {
  return VectorField(std::make_shared<RadialHarmonicField>(std::move(phi)));
}

VectorField VectorField::normal_harmonic(HarmonicExpansion phi) {
  return VectorField(std::make_shared<NormalHarmonicField>(std::move(phi)));
}

VectorField VectorField::surface_normal() {
  return VectorField(std::make_shared<SurfaceNormalField>());
}

VectorField VectorField::tangential_part(const VectorField& inner) {
  return VectorField(std::make_shared<TangentialField>(inner));
}

VectorField VectorField::operator+(const VectorField& other) const {
  return VectorField(std::make_shared<SumField>(*this, 1.0, other, 1.0));
}

VectorField VectorField::operator*(double s) const {
  return VectorField(std::make_shared<SumField>(*this, s, zero(), 0.0));
}

FieldJet VectorField::evaluate(const ChartPoint& p) const { return impl_->evaluate(p); }
bool VectorField::is_ambient() const { return impl_->is_ambient(); }
Vec3 VectorField::value(const Vec3& y) const { return impl_->value(y); }
Mat3 VectorField::jacobian(const Vec3& y) const { return impl_->jacobian(y); }
std::array<Mat3, 3> VectorField::hessian(const Vec3& y) const { return impl_->hessian(y); }
std::string VectorField::describe() const { return impl_->describe(); }

// ---------------------------------------------------------------------------

class ScalarField::Impl {
 public:
  virtual ~Impl() = default;
  virtual ScalarJet evaluate(const ChartPoint& p) const = 0;
  virtual bool is_ambient() const { return false; }
  virtual double value(const Vec3&) const { throw std::logic_error("field is not ambient"); }
  virtual Vec3 gradient(const Vec3&) const { throw std::logic_error("field is not ambient"); }
};

namespace {

class ConstantScalar final : public ScalarField::Impl {
 public:
  explicit ConstantScalar(double c) : c_(c) {}
  ScalarJet evaluate(const ChartPoint&) const override { return {Jet<3>(c_), 3}; }
  bool is_ambient() const override { return true; }
  double value(const Vec3&) const override { return c_; }
  Vec3 gradient(const Vec3&) const override { return Vec3::Zero(); }

 private:
  double c_;
};

class HarmonicScalar final : public ScalarField::Impl {
 public:
  explicit HarmonicScalar(HarmonicExpansion phi) : phi_(std::move(phi)) {}
  ScalarJet evaluate(const ChartPoint& p) const override {
    return {phi_.evaluate<3>(p.theta, p.phi), 3};
  }

 private:
  HarmonicExpansion phi_;
};

class TrigScalar final : public ScalarField::Impl {
 public:
  explicit TrigScalar(std::vector<ScalarField::TrigTerm> terms) : terms_(std::move(terms)) {}
  ScalarJet evaluate(const ChartPoint& p) const override {
    Jet<3> g;
    for (const auto& t : terms_) {
      Jet<3> arg(t.phase);
      for (int k = 0; k < 3; ++k) arg += p.chart.x[k] * t.frequency[k];
      g += sin(arg) * t.amplitude;
    }
    return {g, p.chart.valid_order};
  }
  bool is_ambient() const override { return true; }
  double value(const Vec3& y) const override {
    double v = 0.0;
    for (const auto& t : terms_) v += t.amplitude * std::sin(t.frequency.dot(y) + t.phase);
    return v;
  }
  Vec3 gradient(const Vec3& y) const override {
    Vec3 g = Vec3::Zero();
    for (const auto& t : terms_)
      g += t.amplitude * std::cos(t.frequency.dot(y) + t.phase) * t.frequency;
    return g;
  }

 private:
  std::vector<ScalarField::TrigTerm> terms_;
};

}  // namespace

ScalarField::ScalarField() : ScalarField(constant(0.0)) {}

ScalarField ScalarField::constant(double c) {
  return ScalarField(std::make_shared<ConstantScalar>(c));
}

ScalarField ScalarField::harmonic(HarmonicExpansion phi) {
  return ScalarField(std::make_shared<HarmonicScalar>(std::move(phi)));
}

ScalarField ScalarField::trigonometric(std::vector<TrigTerm> terms) {
  return ScalarField(std::make_shared<TrigScalar>(std::move(terms)));
}

ScalarJet ScalarField::evaluate(const ChartPoint& p) const { return impl_->evaluate(p); }
bool ScalarField::is_ambient() const { return impl_->is_ambient(); }
double ScalarField::value(const Vec3& y) const { return impl_->value(y); }
Vec3 ScalarField::gradient(const Vec3& y) const { return impl_->gradient(y); }

}  // namespace tvn
