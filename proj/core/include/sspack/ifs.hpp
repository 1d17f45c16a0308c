#pragma once

#include "sspack/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sspack {

/// A contractive similitude f(x) = ratio * rotation * x + translation.
///
/// The constructor validates 0 < ratio < 1 and orthogonality of the rotation
/// (entrywise within 1e-12). Compositions produced internally skip the check.
class Similitude {
 public:
  Similitude(double ratio, Mat rotation, Vec translation);

  static Similitude identity(int dim);
  // d = 1 convenience: f(x) = ratio * sign * x + translation.
  static Similitude line(double ratio, double translation, int sign = 1);
  // d = 2 convenience: rotation by angle (radians).
  static Similitude planar(double ratio, double angle, double tx, double ty);

  double ratio() const { return ratio_; }
  const Mat& rotation() const { return rotation_; }
  const Vec& translation() const { return translation_; }
  int dim() const { return static_cast<int>(translation_.size()); }

  Vec operator()(const Vec& x) const { return ratio_ * (rotation_ * x) + translation_; }
  Vec apply_inverse(const Vec& y) const { return rotation_.transpose() * (y - translation_) / ratio_; }

  // (*this) o inner.
  Similitude then_inner(const Similitude& inner) const;
  Vec fixed_point() const;
  Ball image(const Ball& b) const { return {(*this)(b.center), ratio_ * b.radius}; }

 private:
  struct Unchecked {};
  Similitude(Unchecked, double ratio, Mat rotation, Vec translation)
      : ratio_(ratio), rotation_(std::move(rotation)), translation_(std::move(translation)) {}

  double ratio_;
  Mat rotation_;
  Vec translation_;
};

/// A finite system of N >= 2 similitudes acting on the box X.
class Ifs {
 public:
  // Throws DomainError unless every map sends the box into itself.
  Ifs(std::vector<Similitude> maps, Box box);

  std::size_t size() const { return maps_.size(); }
  int dim() const { return box_.dim(); }
  const Similitude& map(std::size_t i) const { return maps_[i]; }
  const std::vector<Similitude>& maps() const { return maps_; }
  const Box& box() const { return box_; }
  std::vector<double> ratios() const;
  double min_ratio() const;

 private:
  std::vector<Similitude> maps_;
  Box box_;
};

/// A finite word over the alphabet {0, ..., N-1}. Letters are zero-based
/// internally; to_string / parse use the one-based digits of the usual notation.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {}
  // "21" -> letters {1, 0}. Only single-digit alphabets.
  static Word parse(const std::string& digits);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<std::uint8_t>& letters() const { return letters_; }

  Word extended(std::uint8_t letter) const;
  Word concat(const Word& tail) const;
  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

struct CylinderNode {
  Word word;
  Similitude map;
  Ball hull;
  double weight;
};

// f_w = f_{w1} o ... o f_{wk}; identity for the empty word.
Similitude compose(const Ifs& ifs, const Word& word);

// B0 = B(c0, R0) with c0 the fixed point of f_1 and R0 = max |f_i(c0) - c0| / (1 - r_i).
Ball invariant_ball(const Ifs& ifs);

CylinderNode cylinder(const Ifs& ifs, const Word& word, double s);

// D(f, g) = max_i sup_{x in X} |f_i(x) - g_i(x)|, evaluated exactly on box corners.
double ifs_distance(const Ifs& f, const Ifs& g);

inline constexpr std::size_t kDefaultSampleCap = std::size_t{1} << 22;

// {f_w(p0) : |w| = depth} in lexicographic order, p0 the fixed point of f_1.
std::vector<Vec> attractor_sample(const Ifs& ifs, int depth, std::size_t cap = kDefaultSampleCap);

/// Lightweight traversal of the cylinder tree: each node keeps its composed
/// map, hull centre f_w(c0) (a point of K), and weight r_w^s.
class CylinderTree {
 public:
  struct Node {
    Similitude map;
    Vec center;
    double radius;
    double weight;
    int depth;
  };

  CylinderTree(Ifs ifs, double s);

  const Ifs& ifs() const { return ifs_; }
  double s() const { return s_; }
  const Ball& root_ball() const { return root_ball_; }
  std::span<const double> weights() const { return weights_; }
  // Absolute allowance for accumulated rounding in hull centres.
  double slack() const { return slack_; }
  // Characteristic coordinate magnitude of the problem.
  double scale() const { return scale_; }

  Node root() const;
  Node child(const Node& parent, std::size_t letter) const;
  Node node(const Word& word) const;
  // Hull radius including the certified inflation and rounding slack.
  double safe_radius(const Node& n) const { return n.radius * (1.0 + kCertifiedInflation) + slack_; }

 private:
  Ifs ifs_;
  double s_;
  Ball root_ball_;
  std::vector<double> weights_;
  std::vector<Vec> first_images_;
  double slack_;
  double scale_;
};

}  // namespace sspack
