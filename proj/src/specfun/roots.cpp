#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tcl/specfun.hpp"

namespace tcl::specfun {
namespace {

constexpr double kPi = std::numbers::pi;

struct BoundaryHit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cplx checked(const ComplexFn& f, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == cplx(0.0, 0.0))
    throw BoundaryHit("function vanishes or is singular on the contour");
  return v;
}

// Phase increment of f along the segment [za, zb], refined until every
// sub-step turns by less than pi/4 and halving does not change the answer.
double segment_phase(const ComplexFn& f, cplx za, cplx zb, cplx fa, cplx fb, int depth) {
  const cplx zm = 0.5 * (za + zb);
  const cplx fm = checked(f, zm);
  const double d1 = std::arg(fm / fa);
  const double d2 = std::arg(fb / fm);
  const double d = std::arg(fb / fa);
  if (std::abs(d1) < kPi / 4 && std::abs(d2) < kPi / 4 && std::abs(d1 + d2 - d) < 1e-9) return d;
  if (depth > 40) throw BoundaryHit("phase refinement did not resolve; zero too close to contour");
  return segment_phase(f, za, zm, fa, fm, depth + 1) + segment_phase(f, zm, zb, fm, fb, depth + 1);
}

double contour_phase(const ComplexFn& f, double re0, double re1, double im0, double im1) {
  const cplx corners[5] = {{re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
  constexpr int kInitial = 24;
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    cplx za = corners[e];
    cplx fa = checked(f, za);
    for (int k = 1; k <= kInitial; ++k) {
      const cplx zb = corners[e] + (corners[e + 1] - corners[e]) * (double(k) / kInitial);
      const cplx fb = checked(f, zb);
      total += segment_phase(f, za, zb, fa, fb, 0);
      za = zb;
      fa = fb;
    }
  }
  return total;
}

struct Box {
  double re0, re1, im0, im1;
  int depth;
  bool contains(cplx z, double pad = 0.0) const {
    return z.real() >= re0 - pad && z.real() <= re1 + pad && z.imag() >= im0 - pad &&
           z.imag() <= im1 + pad;
  }
  cplx center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  double size() const { return std::max(re1 - re0, im1 - im0); }
};

int poles_inside(const std::vector<KnownPole>& poles, const Box& b) {
  int n = 0;
  for (const auto& p : poles)
    if (b.contains(p.location)) n += p.order;
  return n;
}

class Searcher {
 public:
  Searcher(const ComplexFn& f, const RootSearchRegion& region, const RootSearchOptions& opt)
      : f_(f), region_(region), opt_(opt) {}

  std::vector<Root> run() {
    Box top{region_.re_min, region_.re_max, region_.im_min, region_.im_max, 0};
    scale_ = boundary_scale(top);
    int count = 0;
    try {
      count = zero_count(top);
    } catch (const BoundaryHit&) {
      throw std::runtime_error("find_roots: f vanishes or is singular on the region boundary");
    }
    search(top, count);
    std::sort(roots_.begin(), roots_.end(), [](const Root& a, const Root& b) {
      const double tol = 1e-9 * std::max(1.0, std::max(std::abs(a.z), std::abs(b.z)));
      if (std::abs(a.z.real() - b.z.real()) > tol) return a.z.real() < b.z.real();
      return a.z.imag() < b.z.imag();
    });
    int found = 0;
    for (const auto& r : roots_) found += r.multiplicity;
    if (found != count) {
      std::ostringstream msg;
      msg << "find_roots: located " << found << " roots but the winding number gives " << count;
      throw std::runtime_error(msg.str());
    }
    return roots_;
  }

 private:
  double boundary_scale(const Box& b) const {
    std::vector<double> mags;
    for (int k = 0; k < 16; ++k) {
      const double t = (k + 0.5) / 16.0;
      for (cplx z : {cplx(b.re0 + t * (b.re1 - b.re0), b.im0), cplx(b.re1, b.im0 + t * (b.im1 - b.im0)),
                     cplx(b.re0 + t * (b.re1 - b.re0), b.im1), cplx(b.re0, b.im0 + t * (b.im1 - b.im0))}) {
        const double m = std::abs(f_(z));
        if (std::isfinite(m)) mags.push_back(m);
      }
    }
    if (mags.empty()) return 1.0;
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double m = mags[mags.size() / 2];
    return m > 0.0 ? m : 1.0;
  }

  int zero_count(const Box& b) const {
    const double w = contour_phase(f_, b.re0, b.re1, b.im0, b.im1) / (2.0 * kPi);
    const double n = std::round(w);
    if (std::abs(w - n) > 0.05) throw BoundaryHit("winding number is not an integer");
    return static_cast<int>(n) + poles_inside(opt_.poles, b);
  }

  bool try_newton(const Box& b, cplx seed, cplx& out) const {
    try {
      out = newton_polish(f_, seed, 1e-14, opt_.newton_max_iter);
    } catch (const std::exception&) {
      return false;
    }
    return b.contains(out, 1e-10 * (1.0 + b.size()));
  }

  bool known(cplx z) const {
    for (const auto& r : roots_)
      if (std::abs(r.z - z) <= opt_.dedup_tol * std::max(1.0, std::abs(z))) return true;
    return false;
  }

  void record(cplx z, int multiplicity) {
    if (known(z)) return;
    roots_.push_back({z, std::abs(f_(z)) / scale_, multiplicity});
  }

  // Split fractions avoid symmetric cuts through the real axis.
  static double split_fraction(int depth) { return (depth % 2 == 0) ? 0.4637 : 0.5219; }

  void search(const Box& b, int count) {
    if (count <= 0) return;
    const bool small = b.size() < 1e-6 * (1.0 + std::abs(b.center()));
    if (count == 1 || small || b.depth >= opt_.max_depth) {
      cplx z;
      if (try_newton(b, b.center(), z)) {
        if (count == 1 || small) {
          record(z, count);
          return;
        }
      } else if (small) {
        throw std::runtime_error("find_roots: Newton polish failed in a shrunken box");
      }
      if (b.depth >= opt_.max_depth) {
        // Collect whatever distinct roots Newton reaches from a seed lattice.
        std::vector<cplx> local;
        for (int i = 0; i < 5; ++i)
          for (int j = 0; j < 5; ++j) {
            const cplx seed(b.re0 + (i + 0.5) / 5 * (b.re1 - b.re0), b.im0 + (j + 0.5) / 5 * (b.im1 - b.im0));
            if (try_newton(b, seed, z)) {
              bool dup = false;
              for (auto& q : local)
                if (std::abs(q - z) <= opt_.dedup_tol * std::max(1.0, std::abs(z))) dup = true;
              if (!dup) local.push_back(z);
            }
          }
        if (local.empty()) throw std::runtime_error("find_roots: could not polish roots at max depth");
        const int extra = count - static_cast<int>(local.size());
        for (std::size_t k = 0; k < local.size(); ++k)
          record(local[k], 1 + (k == 0 ? std::max(extra, 0) : 0));
        return;
      }
    }
    // Bisect along the longer side, retrying the cut position if it grazes a zero.
    for (int attempt = 0; attempt < 6; ++attempt) {
      const double frac = split_fraction(b.depth) + 0.0173 * attempt;
      Box lo = b, hi = b;
      lo.depth = hi.depth = b.depth + 1;
      if (b.re1 - b.re0 >= b.im1 - b.im0) {
        const double cut = b.re0 + frac * (b.re1 - b.re0);
        lo.re1 = cut;
        hi.re0 = cut;
      } else {
        const double cut = b.im0 + frac * (b.im1 - b.im0);
        lo.im1 = cut;
        hi.im0 = cut;
      }
      int n_lo, n_hi;
      try {
        n_lo = zero_count(lo);
        n_hi = zero_count(hi);
      } catch (const BoundaryHit&) {
        continue;
      }
      if (n_lo + n_hi != count) continue;
      search(lo, n_lo);
      search(hi, n_hi);
      return;
    }
    throw std::runtime_error("find_roots: could not subdivide the search box consistently");
  }

  const ComplexFn& f_;
  RootSearchRegion region_;
  RootSearchOptions opt_;
  double scale_ = 1.0;
  std::vector<Root> roots_;
};

}  // namespace

cplx newton_polish(const ComplexFn& f, cplx z0, double tol, int max_iter) {
  cplx z = z0;
  cplx fz = f(z);
  for (int it = 0; it < max_iter; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
    if (d == cplx(0.0, 0.0) || !std::isfinite(std::abs(d)))
      throw std::runtime_error("newton_polish: vanishing derivative");
    cplx step = -fz / d;
    if (!std::isfinite(std::abs(step))) throw std::runtime_error("newton_polish: non-finite step");
    cplx z1 = z + step;
    cplx f1 = f(z1);
    int halvings = 0;
    while (!(std::abs(f1) < std::abs(fz)) && halvings < 30 && std::abs(step) > tol * std::max(1.0, std::abs(z))) {
      step *= 0.5;
      z1 = z + step;
      f1 = f(z1);
      ++halvings;
    }
    if (std::abs(step) <= tol * std::max(1.0, std::abs(z)) || f1 == cplx(0.0, 0.0)) return z1;
    if (!(std::abs(f1) < std::abs(fz))) {
      // Stalled at the round-off floor.
      if (std::abs(step) < 1e-9 * std::max(1.0, std::abs(z))) return z;
      throw std::runtime_error("newton_polish: no descent");
    }
    z = z1;
    fz = f1;
  }
  throw std::runtime_error("newton_polish: did not converge");
}

int winding_number(const ComplexFn& f, double re0, double re1, double im0, double im1) {
  double w;
  try {
    w = contour_phase(f, re0, re1, im0, im1) / (2.0 * kPi);
  } catch (const BoundaryHit& e) {
    throw std::runtime_error(std::string("winding_number: ") + e.what());
  }
  return static_cast<int>(std::lround(w));
}

std::vector<Root> find_roots(const ComplexFn& f, const RootSearchRegion& region,
                             const RootSearchOptions& opt) {
  if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max))
    throw std::invalid_argument("find_roots: empty region");
  return Searcher(f, region, opt).run();
}

IsolineScan scan_grid(const ComplexFn& f, const RootSearchRegion& region) {
  IsolineScan s;
  s.nx = region.scan_nx;
  s.ny = region.scan_ny;
  for (int i = 0; i < s.nx; ++i)
    s.re.push_back(region.re_min + (region.re_max - region.re_min) * i / std::max(1, s.nx - 1));
  for (int j = 0; j < s.ny; ++j)
    s.im.push_back(region.im_min + (region.im_max - region.im_min) * j / std::max(1, s.ny - 1));
  s.value.resize(static_cast<std::size_t>(s.nx) * s.ny);
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.nx; ++i) s.value[j * s.nx + i] = f(cplx(s.re[i], s.im[j]));
  return s;
}

}  // namespace tcl::specfun
