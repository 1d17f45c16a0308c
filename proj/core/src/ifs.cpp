#include "sspack/ifs.hpp"

#include "sspack/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sspack {

namespace {

constexpr double kOrthogonalityTol = 1e-12;
constexpr double kBoxTol = 1e-12;

void check_word(const Ifs& ifs, const Word& word) {
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] >= ifs.size()) {
      std::ostringstream os;
      os << "letter " << int(word[k]) + 1 << " at position " << k << " out of range for IFS with " << ifs.size()
         << " maps";
      throw InvalidWord(os.str());
    }
  }
}

}  // namespace

Similitude::Similitude(double ratio, Mat rotation, Vec translation)
    : ratio_(ratio), rotation_(std::move(rotation)), translation_(std::move(translation)) {
  if (!(ratio_ > 0.0 && ratio_ < 1.0)) {
    throw DomainError("similitude ratio must lie in (0, 1), got " + std::to_string(ratio_));
  }
  const auto d = translation_.size();
  if (d < 1 || d > kMaxDim) throw DomainError("similitude dimension out of supported range");
  if (rotation_.rows() != d || rotation_.cols() != d) throw DomainError("rotation shape does not match translation");
  const Mat gram = rotation_.transpose() * rotation_;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) > kOrthogonalityTol) {
        throw DomainError("rotation matrix is not orthogonal");
      }
    }
  }
}

Similitude Similitude::identity(int dim) {
  return Similitude(Unchecked{}, 1.0, Mat::Identity(dim, dim), Vec::Zero(dim));
}

Similitude Similitude::line(double ratio, double translation, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  Mat o(1, 1);
  o(0, 0) = sign;
  return Similitude(ratio, o, scalar_vec(translation));
}

Similitude Similitude::planar(double ratio, double angle, double tx, double ty) {
  Mat o(2, 2);
  o << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return Similitude(ratio, o, make_vec({tx, ty}));
}

Similitude Similitude::then_inner(const Similitude& inner) const {
  return Similitude(Unchecked{}, ratio_ * inner.ratio_, rotation_ * inner.rotation_, (*this)(inner.translation_));
}

Vec Similitude::fixed_point() const {
  const auto d = translation_.size();
  const Mat a = Mat::Identity(d, d) - ratio_ * rotation_;
  return a.partialPivLu().solve(translation_);
}

Ifs::Ifs(std::vector<Similitude> maps, Box box) : maps_(std::move(maps)), box_(std::move(box)) {
  if (maps_.size() < 2) throw DomainError("an IFS needs at least two maps");
  if (maps_.size() > 255) throw DomainError("at most 255 maps are supported");
  const int d = box_.dim();
  if (box_.hi.size() != d) throw DomainError("box bounds have mismatched dimensions");
  for (int k = 0; k < d; ++k) {
    if (!(box_.lo(k) < box_.hi(k))) throw DomainError("box must have lo < hi in every coordinate");
  }
  const double tol = kBoxTol * std::max(1.0, box_.lo.cwiseAbs().maxCoeff() + box_.hi.cwiseAbs().maxCoeff());
  const auto corners = box_.corners();
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    if (maps_[i].dim() != d) throw DomainError("map dimension does not match box dimension");
    for (const auto& c : corners) {
      if (!box_.contains(maps_[i](c), tol)) {
        throw DomainError("map " + std::to_string(i + 1) + " does not send the box into itself");
      }
    }
  }
}

std::vector<double> Ifs::ratios() const {
  std::vector<double> r;
  r.reserve(maps_.size());
  for (const auto& m : maps_) r.push_back(m.ratio());
  return r;
}

double Ifs::min_ratio() const {
  double r = 1.0;
  for (const auto& m : maps_) r = std::min(r, m.ratio());
  return r;
}

Word Word::parse(const std::string& digits) {
  std::vector<std::uint8_t> letters;
  letters.reserve(digits.size());
  for (char c : digits) {
    if (c < '1' || c > '9') throw InvalidWord(std::string("invalid letter '") + c + "' in word");
    letters.push_back(static_cast<std::uint8_t>(c - '1'));
  }
  return Word(std::move(letters));
}

Word Word::extended(std::uint8_t letter) const {
  auto l = letters_;
  l.push_back(letter);
  return Word(std::move(l));
}

Word Word::concat(const Word& tail) const {
  auto l = letters_;
  l.insert(l.end(), tail.letters_.begin(), tail.letters_.end());
  return Word(std::move(l));
}

std::string Word::to_string() const {
  const bool small = std::all_of(letters_.begin(), letters_.end(), [](std::uint8_t x) { return x < 9; });
  std::string out;
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    if (small) {
      out.push_back(static_cast<char>('1' + letters_[k]));
    } else {
      if (k) out.push_back('.');
      out += std::to_string(letters_[k] + 1);
    }
  }
  return out;
}

Similitude compose(const Ifs& ifs, const Word& word) {
  check_word(ifs, word);
  Similitude acc = Similitude::identity(ifs.dim());
  for (std::size_t k = 0; k < word.size(); ++k) acc = acc.then_inner(ifs.map(word[k]));
  return acc;
}

Ball invariant_ball(const Ifs& ifs) {
  const Vec c0 = ifs.map(0).fixed_point();
  double r0 = 0.0;
  for (const auto& f : ifs.maps()) r0 = std::max(r0, (f(c0) - c0).norm() / (1.0 - f.ratio()));
  // Rounding in the fixed point and the images is absorbed by a relative inflation.
  return {c0, inflate_up(r0)};
}

CylinderNode cylinder(const Ifs& ifs, const Word& word, double s) {
  if (!(s > 0.0)) throw ParameterError("dimension s must be positive");
  Similitude map = compose(ifs, word);
  const Ball root = invariant_ball(ifs);
  double weight = 1.0;
  for (std::size_t k = 0; k < word.size(); ++k) weight *= std::pow(ifs.map(word[k]).ratio(), s);
  Ball hull = map.image(root);
  return {word, std::move(map), std::move(hull), weight};
}

double ifs_distance(const Ifs& f, const Ifs& g) {
  if (f.size() != g.size()) throw IncompatibleSystems("IFS have different numbers of maps");
  if (f.dim() != g.dim()) throw IncompatibleSystems("IFS have different ambient dimensions");
  if (f.box().lo != g.box().lo || f.box().hi != g.box().hi) throw IncompatibleSystems("IFS have different boxes");
  const auto corners = f.box().corners();
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (const auto& c : corners) d = std::max(d, (f.map(i)(c) - g.map(i)(c)).norm());
  }
  return d;
}

std::vector<Vec> attractor_sample(const Ifs& ifs, int depth, std::size_t cap) {
  if (depth < 0) throw ParameterError("depth must be nonnegative");
  const double count = std::pow(static_cast<double>(ifs.size()), depth);
  if (count > static_cast<double>(cap)) {
    throw BudgetExceeded("attractor sample of depth " + std::to_string(depth) + " exceeds the point cap");
  }
  const Vec p0 = ifs.map(0).fixed_point();
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  // Depth-first in lexicographic order: f_w(p0) with w = i1 i2 ... ik.
  auto rec = [&](auto&& self, const Similitude& prefix, int level) -> void {
    if (level == depth) {
      pts.push_back(prefix(p0));
      return;
    }
    for (std::size_t i = 0; i < ifs.size(); ++i) self(self, prefix.then_inner(ifs.map(i)), level + 1);
  };
  rec(rec, Similitude::identity(ifs.dim()), 0);
  return pts;
}

CylinderTree::CylinderTree(Ifs ifs, double s) : ifs_(std::move(ifs)), s_(s), root_ball_(invariant_ball(ifs_)) {
  if (!(s_ > 0.0)) throw ParameterError("dimension s must be positive");
  for (const auto& f : ifs_.maps()) {
    weights_.push_back(std::pow(f.ratio(), s_));
    first_images_.push_back(f(root_ball_.center));
  }
  scale_ = root_ball_.center.cwiseAbs().maxCoeff() + root_ball_.radius;
  slack_ = kGeometricSlack * scale_;
}

CylinderTree::Node CylinderTree::root() const {
  return {Similitude::identity(ifs_.dim()), root_ball_.center, root_ball_.radius, 1.0, 0};
}

CylinderTree::Node CylinderTree::child(const Node& parent, std::size_t letter) const {
  const Similitude& f = ifs_.map(letter);
  return {parent.map.then_inner(f), parent.map(first_images_[letter]), parent.radius * f.ratio(),
          parent.weight * weights_[letter], parent.depth + 1};
}

CylinderTree::Node CylinderTree::node(const Word& word) const {
  check_word(ifs_, word);
  Node n = root();
  for (std::size_t k = 0; k < word.size(); ++k) n = child(n, word[k]);
  return n;
}

}  // namespace sspack
