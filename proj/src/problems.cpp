#include "cdfo/problems.hpp"

#include <cmath>
#include <numbers>

namespace cdfo {

namespace {

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Data tables of the Moré-Wild residual definitions.
const double kBardY[15] = {.14, .18, .22, .25, .29, .32, .35, .39, .37, .58, .73, .96, 1.34, 2.10, 4.39};
const double kKowalikV[11] = {4., 2., 1., .5, .25, .167, .125, .1, .0833, .0714, .0625};
const double kKowalikY[11] = {.1957, .1947, .1735, .16, .0844, .0627, .0456, .0342, .0323, .0235, .0246};
const double kMeyerY[16] = {34780., 28610., 23650., 19630., 16370., 13720., 11540., 9744.,
                            8261.,  7030.,  6005.,  5147.,  4427.,  3820.,  3307.,  2872.};
const double kOsborne1Y[33] = {.844, .908, .932, .936, .925, .908, .881, .850, .818, .784, .751,
                               .718, .685, .658, .628, .603, .580, .558, .538, .522, .506, .490,
                               .478, .467, .457, .448, .438, .431, .424, .420, .414, .411, .406};
const double kOsborne2Y[65] = {1.366, 1.191, 1.112, 1.013, .991, .885, .831, .847, .786, .725, .746, .679, .608,
                               .655,  .616,  .606,  .602,  .626, .651, .724, .649, .649, .694, .644, .624, .661,
                               .612,  .558,  .533,  .495,  .500, .423, .395, .375, .372, .391, .396, .405, .428,
                               .429,  .523,  .562,  .607,  .653, .672, .708, .633, .668, .645, .632, .591, .559,
                               .597,  .625,  .739,  .710,  .729, .720, .636, .581, .428, .292, .162, .098, .054};

using ResidualFn = std::function<Vector(const Vector&)>;

// Moré-Wild problem function `nprob` (1..22) with n variables and m residuals.
ResidualFn more_wild_residuals(int nprob, Index n, Index m) {
  switch (nprob) {
    case 1:  // linear, full rank
      return [n, m](const Vector& x) {
        const double temp = 2.0 * x.sum() / static_cast<double>(m) + 1.0;
        Vector f = Vector::Constant(m, -temp);
        f.head(n) += x;
        return f;
      };
    case 2:  // linear, rank 1
      return [n, m](const Vector& x) {
        double s = 0.0;
        for (Index j = 0; j < n; ++j) s += static_cast<double>(j + 1) * x(j);
        Vector f(m);
        for (Index i = 0; i < m; ++i) f(i) = static_cast<double>(i + 1) * s - 1.0;
        return f;
      };
    case 3:  // linear, rank 1 with zero columns and rows
      return [n, m](const Vector& x) {
        double s = 0.0;
        for (Index j = 1; j < n - 1; ++j) s += static_cast<double>(j + 1) * x(j);
        Vector f(m);
        for (Index i = 0; i < m - 1; ++i) f(i) = static_cast<double>(i) * s - 1.0;
        f(m - 1) = -1.0;
        return f;
      };
    case 4:  // Rosenbrock
      return [](const Vector& x) { return vec({10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0)}); };
    case 5:  // helical valley
      return [](const Vector& x) {
        double th;
        if (x(0) > 0.0) {
          th = std::atan(x(1) / x(0)) / (2.0 * std::numbers::pi);
        } else if (x(0) < 0.0) {
          th = std::atan(x(1) / x(0)) / (2.0 * std::numbers::pi) + 0.5;
        } else {
          th = std::copysign(0.25, x(1));
        }
        const double r = sqrt(x(0) * x(0) + x(1) * x(1));
        return vec({10.0 * (x(2) - 10.0 * th), 10.0 * (r - 1.0), x(2)});
      };
    case 6:  // Powell singular
      return [](const Vector& x) {
        return vec({x(0) + 10.0 * x(1), sqrt(5.0) * (x(2) - x(3)), std::pow(x(1) - 2.0 * x(2), 2),
                    sqrt(10.0) * std::pow(x(0) - x(3), 2)});
      };
    case 7:  // Freudenstein and Roth
      return [](const Vector& x) {
        return vec({-13.0 + x(0) + ((5.0 - x(1)) * x(1) - 2.0) * x(1),
                    -29.0 + x(0) + ((1.0 + x(1)) * x(1) - 14.0) * x(1)});
      };
    case 8:  // Bard
      return [](const Vector& x) {
        Vector f(15);
        for (int i = 1; i <= 15; ++i) {
          const double t1 = i;
          const double t2 = 16 - i;
          const double t3 = i > 8 ? t2 : t1;
          f(i - 1) = kBardY[i - 1] - (x(0) + t1 / (x(1) * t2 + x(2) * t3));
        }
        return f;
      };
    case 9:  // Kowalik and Osborne
      return [](const Vector& x) {
        Vector f(11);
        for (int i = 0; i < 11; ++i) {
          const double v = kKowalikV[i];
          const double num = v * (v + x(1));
          const double den = v * (v + x(2)) + x(3);
          f(i) = kKowalikY[i] - x(0) * num / den;
        }
        return f;
      };
    case 10:  // Meyer
      return [](const Vector& x) {
        Vector f(16);
        for (int i = 1; i <= 16; ++i) {
          const double temp = 5.0 * i + 45.0 + x(2);
          f(i - 1) = x(0) * exp(x(1) / temp) - kMeyerY[i - 1];
        }
        return f;
      };
    case 11:  // Watson
      return [n](const Vector& x) {
        Vector f(31);
        for (int i = 1; i <= 29; ++i) {
          const double div = i / 29.0;
          double s1 = 0.0;
          double dx = 1.0;
          for (Index j = 1; j < n; ++j) {
            s1 += static_cast<double>(j) * dx * x(j);
            dx *= div;
          }
          double s2 = 0.0;
          dx = 1.0;
          for (Index j = 0; j < n; ++j) {
            s2 += dx * x(j);
            dx *= div;
          }
          f(i - 1) = s1 - s2 * s2 - 1.0;
        }
        f(29) = x(0);
        f(30) = x(1) - x(0) * x(0) - 1.0;
        return f;
      };
    case 12:  // Box three-dimensional
      return [m](const Vector& x) {
        Vector f(m);
        for (Index i = 1; i <= m; ++i) {
          const double temp = static_cast<double>(i);
          const double t1 = temp / 10.0;
          f(i - 1) = exp(-t1 * x(0)) - exp(-t1 * x(1)) + (exp(-temp) - exp(-t1)) * x(2);
        }
        return f;
      };
    case 13:  // Jennrich and Sampson
      return [m](const Vector& x) {
        Vector f(m);
        for (Index i = 1; i <= m; ++i) {
          const double temp = static_cast<double>(i);
          f(i - 1) = 2.0 + 2.0 * temp - exp(temp * x(0)) - exp(temp * x(1));
        }
        return f;
      };
    case 14:  // Brown and Dennis
      return [m](const Vector& x) {
        Vector f(m);
        for (Index i = 1; i <= m; ++i) {
          const double temp = static_cast<double>(i) / 5.0;
          const double t1 = x(0) + temp * x(1) - exp(temp);
          const double t2 = x(2) + sin(temp) * x(3) - cos(temp);
          f(i - 1) = t1 * t1 + t2 * t2;
        }
        return f;
      };
    case 15:  // Chebyquad
      return [n, m](const Vector& x) {
        Vector f = Vector::Zero(m);
        for (Index j = 0; j < n; ++j) {
          double t1 = 1.0;
          double t2 = 2.0 * x(j) - 1.0;
          const double t = 2.0 * t2;
          for (Index i = 0; i < m; ++i) {
            f(i) += t2;
            const double th = t * t2 - t1;
            t1 = t2;
            t2 = th;
          }
        }
        int iev = -1;
        for (Index i = 0; i < m; ++i) {
          f(i) /= static_cast<double>(n);
          if (iev > 0) {
            const double ii = static_cast<double>(i + 1);
            f(i) += 1.0 / (ii * ii - 1.0);
          }
          iev = -iev;
        }
        return f;
      };
    case 16:  // Brown almost-linear
      return [n](const Vector& x) {
        const double sum = x.sum() - static_cast<double>(n + 1);
        const double prod = x.prod();
        Vector f(n);
        for (Index i = 0; i < n - 1; ++i) f(i) = x(i) + sum;
        f(n - 1) = prod - 1.0;
        return f;
      };
    case 17:  // Osborne 1
      return [](const Vector& x) {
        Vector f(33);
        for (int i = 0; i < 33; ++i) {
          const double temp = 10.0 * i;
          f(i) = kOsborne1Y[i] - (x(0) + x(1) * exp(-x(3) * temp) + x(2) * exp(-x(4) * temp));
        }
        return f;
      };
    case 18:  // Osborne 2
      return [](const Vector& x) {
        Vector f(65);
        for (int i = 0; i < 65; ++i) {
          const double temp = i / 10.0;
          const double e1 = exp(-x(4) * temp);
          const double e2 = exp(-x(5) * std::pow(temp - x(8), 2));
          const double e3 = exp(-x(6) * std::pow(temp - x(9), 2));
          const double e4 = exp(-x(7) * std::pow(temp - x(10), 2));
          f(i) = kOsborne2Y[i] - (x(0) * e1 + x(1) * e2 + x(2) * e3 + x(3) * e4);
        }
        return f;
      };
    case 19:  // BDQRTIC
      return [n](const Vector& x) {
        Vector f(2 * (n - 4));
        for (Index i = 0; i < n - 4; ++i) {
          f(i) = -4.0 * x(i) + 3.0;
          f(n - 4 + i) = x(i) * x(i) + 2.0 * x(i + 1) * x(i + 1) + 3.0 * x(i + 2) * x(i + 2) +
                         4.0 * x(i + 3) * x(i + 3) + 5.0 * x(n - 1) * x(n - 1);
        }
        return f;
      };
    case 20:  // cube
      return [n](const Vector& x) {
        Vector f(n);
        f(0) = x(0) - 1.0;
        for (Index i = 1; i < n; ++i) f(i) = 10.0 * (x(i) - std::pow(x(i - 1), 3));
        return f;
      };
    case 21:  // Mancino
      return [n](const Vector& x) {
        Vector f(n);
        for (Index i = 0; i < n; ++i) {
          double ss = 0.0;
          for (Index j = 0; j < n; ++j) {
            const double v2 = sqrt(x(i) * x(i) + static_cast<double>(i + 1) / static_cast<double>(j + 1));
            const double lv = log(v2);
            ss += v2 * (std::pow(sin(lv), 5) + std::pow(cos(lv), 5));
          }
          f(i) = 1400.0 * x(i) + std::pow(static_cast<double>(i + 1) - 50.0, 3) + ss;
        }
        return f;
      };
    case 22:  // HEART8
      return [](const Vector& x) {
        Vector f(8);
        f(0) = x(0) + x(1) + 0.69;
        f(1) = x(2) + x(3) + 0.044;
        f(2) = x(4) * x(0) + x(5) * x(1) - x(6) * x(2) - x(7) * x(3) + 1.57;
        f(3) = x(6) * x(0) + x(7) * x(1) + x(4) * x(2) + x(5) * x(3) + 1.31;
        f(4) = x(0) * (x(4) * x(4) - x(6) * x(6)) - 2.0 * x(2) * x(4) * x(6) +
               x(1) * (x(5) * x(5) - x(7) * x(7)) - 2.0 * x(3) * x(5) * x(7) + 2.65;
        f(5) = x(2) * (x(4) * x(4) - x(6) * x(6)) + 2.0 * x(0) * x(4) * x(6) +
               x(3) * (x(5) * x(5) - x(7) * x(7)) + 2.0 * x(1) * x(5) * x(7) - 2.0;
        f(6) = x(0) * x(4) * (x(4) * x(4) - 3.0 * x(6) * x(6)) + x(2) * x(6) * (x(6) * x(6) - 3.0 * x(4) * x(4)) +
               x(1) * x(5) * (x(5) * x(5) - 3.0 * x(7) * x(7)) + x(3) * x(7) * (x(7) * x(7) - 3.0 * x(5) * x(5)) +
               12.6;
        f(7) = x(2) * x(4) * (x(4) * x(4) - 3.0 * x(6) * x(6)) - x(0) * x(6) * (x(6) * x(6) - 3.0 * x(4) * x(4)) +
               x(3) * x(5) * (x(5) * x(5) - 3.0 * x(7) * x(7)) - x(1) * x(7) * (x(7) * x(7) - 3.0 * x(5) * x(5)) -
               9.48;
        return f;
      };
    default:
      throw InvalidArgument("unknown Moré-Wild problem number");
  }
}

Vector more_wild_start(int nprob, Index n) {
  switch (nprob) {
    case 1:
    case 2:
    case 3:
      return Vector::Ones(n);
    case 4: return vec({-1.2, 1.0});
    case 5: return vec({-1.0, 0.0, 0.0});
    case 6: return vec({3.0, -1.0, 0.0, 1.0});
    case 7: return vec({0.5, -2.0});
    case 8: return vec({1.0, 1.0, 1.0});
    case 9: return vec({0.25, 0.39, 0.415, 0.39});
    case 10: return vec({0.02, 4000.0, 250.0});
    case 11: return Vector::Constant(n, 0.5);
    case 12: return vec({0.0, 10.0, 20.0});
    case 13: return vec({0.3, 0.4});
    case 14: return vec({25.0, 5.0, -5.0, -1.0});
    case 15: {
      Vector x(n);
      for (Index i = 0; i < n; ++i) x(i) = static_cast<double>(i + 1) / static_cast<double>(n + 1);
      return x;
    }
    case 16: return Vector::Constant(n, 0.5);
    case 17: return vec({0.5, 1.5, 1.0, 0.01, 0.02});
    case 18: return vec({1.3, 0.65, 0.65, 0.7, 0.6, 3.0, 5.0, 7.0, 2.0, 4.5, 5.5});
    case 19: return Vector::Ones(n);
    case 20: return Vector::Constant(n, 0.5);
    case 21: {
      Vector x(n);
      for (Index i = 1; i <= n; ++i) {
        double ss = 0.0;
        for (Index j = 1; j <= n; ++j) {
          const double q = sqrt(static_cast<double>(i) / static_cast<double>(j));
          ss += q * (std::pow(sin(log(q)), 5) + std::pow(cos(log(q)), 5));
        }
        x(i - 1) = -8.710996e-4 * (std::pow(static_cast<double>(i) - 50.0, 3) + ss);
      }
      return x;
    }
    case 22: return vec({-0.3, -0.39, 0.3, -0.344, -1.2, 2.69, 1.59, -1.5});
    default: throw InvalidArgument("unknown Moré-Wild problem number");
  }
}

struct MoreWildEntry {
  int nprob;
  Index n;
  Index m;
  int scale;  // 0: standard start, 1: ten times the standard start
};

// (problem, n, m, start scaling) for the 53 benchmark instances.
constexpr MoreWildEntry kMoreWildTable[53] = {
    {1, 9, 45, 0},   {1, 9, 45, 1},   {2, 7, 35, 0},   {2, 7, 35, 1},   {3, 7, 35, 0},   {3, 7, 35, 1},
    {4, 2, 2, 0},    {4, 2, 2, 1},    {5, 3, 3, 0},    {5, 3, 3, 1},    {6, 4, 4, 0},    {6, 4, 4, 1},
    {7, 2, 2, 0},    {7, 2, 2, 1},    {8, 3, 15, 0},   {8, 3, 15, 1},   {9, 4, 11, 0},   {10, 3, 16, 0},
    {11, 6, 31, 0},  {11, 6, 31, 1},  {11, 9, 31, 0},  {11, 9, 31, 1},  {11, 12, 31, 0}, {11, 12, 31, 1},
    {12, 3, 10, 0},  {13, 2, 10, 0},  {14, 4, 20, 0},  {14, 4, 20, 1},  {15, 6, 6, 0},   {15, 7, 7, 0},
    {15, 8, 8, 0},   {15, 9, 9, 0},   {15, 10, 10, 0}, {15, 11, 11, 0}, {16, 10, 10, 0}, {17, 5, 33, 0},
    {18, 11, 65, 0}, {18, 11, 65, 1}, {19, 8, 8, 0},   {19, 10, 12, 0}, {19, 11, 14, 0}, {19, 12, 16, 0},
    {20, 5, 5, 0},   {20, 6, 6, 0},   {20, 8, 8, 0},   {21, 5, 5, 0},   {21, 5, 5, 1},   {21, 8, 8, 0},
    {21, 10, 10, 0}, {21, 12, 12, 0}, {21, 12, 12, 1}, {22, 8, 8, 0},   {22, 8, 8, 1}};

const char* more_wild_name(int nprob) {
  static const char* names[22] = {"linear_full_rank", "linear_rank1",      "linear_rank1_zero",
                                  "rosenbrock",       "helical_valley",    "powell_singular",
                                  "freudenstein_roth", "bard",             "kowalik_osborne",
                                  "meyer",            "watson",            "box3d",
                                  "jennrich_sampson", "brown_dennis",      "chebyquad",
                                  "brown_almost_linear", "osborne1",       "osborne2",
                                  "bdqrtic",          "cube",              "mancino",
                                  "heart8"};
  return names[nprob - 1];
}

bool varies_in_dimension(int nprob) {
  return nprob == 11 || nprob == 15 || nprob == 19 || nprob == 20 || nprob == 21;
}

// Known minima of sum r_i^2 from the benchmark literature (halved on use).
std::optional<double> more_wild_sum_of_squares_min(int nprob, Index n, Index m) {
  const double md = static_cast<double>(m);
  switch (nprob) {
    case 1: return md - static_cast<double>(n);
    case 2: return md * (md - 1.0) / (2.0 * (2.0 * md + 1.0));
    case 3: return (md * md + 3.0 * md - 6.0) / (2.0 * (2.0 * md - 3.0));
    case 4:
    case 5:
    case 6:
    case 7: return 0.0;
    case 8: return 8.21487e-3;
    case 9: return 3.07505e-4;
    case 10: return 87.9458;
    case 11:
      if (n == 6) return 2.28767e-3;
      if (n == 9) return 1.39976e-6;
      if (n == 12) return 4.72238e-10;
      return std::nullopt;
    case 12: return 0.0;
    case 13: return m == 10 ? std::optional<double>(124.362) : std::nullopt;
    case 14: return m == 20 ? std::optional<double>(85822.2) : std::nullopt;
    case 15:
      if (n <= 7 || n == 9) return 0.0;
      if (n == 8) return 3.51687e-3;
      if (n == 10) return 6.50395e-3;
      return std::nullopt;
    case 16: return 0.0;
    case 17: return 5.46489e-5;
    case 18: return 4.01377e-2;
    case 20:
    case 21:
    case 22: return 0.0;
    default: return std::nullopt;
  }
}

std::vector<LeastSquaresProblem> build_suite() {
  std::vector<LeastSquaresProblem> out;
  for (const auto& e : kMoreWildTable) {
    LeastSquaresProblem p;
    p.name = more_wild_name(e.nprob);
    if (varies_in_dimension(e.nprob)) p.name += "_n" + std::to_string(e.n);
    if (e.scale == 1) p.name += "_x10";
    p.n = e.n;
    p.m = e.m;
    p.residuals = more_wild_residuals(e.nprob, e.n, e.m);
    p.x0 = more_wild_start(e.nprob, e.n) * (e.scale == 1 ? 10.0 : 1.0);
    if (auto ss = more_wild_sum_of_squares_min(e.nprob, e.n, e.m)) p.fstar = 0.5 * *ss;
    out.push_back(std::move(p));
  }

  {
    LeastSquaresProblem p{"biggs_exp6", 6, 13, {}, vec({1.0, 2.0, 1.0, 1.0, 1.0, 1.0}), 0.0};
    p.residuals = [](const Vector& x) {
      Vector f(13);
      for (int i = 1; i <= 13; ++i) {
        const double t = 0.1 * i;
        const double y = exp(-t) - 5.0 * exp(-10.0 * t) + 3.0 * exp(-4.0 * t);
        f(i - 1) = x(2) * exp(-t * x(0)) - x(3) * exp(-t * x(1)) + x(5) * exp(-t * x(4)) - y;
      }
      return f;
    };
    out.push_back(std::move(p));
  }
  {
    // Dixon's tridiagonal quadratic in residual form.
    LeastSquaresProblem p{"dixon", 10, 10, {}, Vector::Constant(10, -1.0), 0.0};
    p.residuals = [](const Vector& x) {
      Vector f(10);
      f(0) = x(0) - 1.0;
      for (int j = 1; j < 9; ++j) f(j) = x(j) - x(j + 1);
      f(9) = x(9) - 1.0;
      return f;
    };
    out.push_back(std::move(p));
  }
  {
    LeastSquaresProblem p{"gulf", 3, 65, {}, vec({5.0, 2.5, 0.15}), 0.0};
    p.residuals = [](const Vector& x) {
      Vector f(65);
      for (int i = 1; i <= 65; ++i) {
        const double t = i / 100.0;
        const double y = 25.0 + std::pow(-50.0 * log(t), 2.0 / 3.0);
        f(i - 1) = exp(-std::pow(std::abs(y - x(1)), x(2)) / x(0)) - t;
      }
      return f;
    };
    out.push_back(std::move(p));
  }
  {
    LeastSquaresProblem p{"powell_badly_scaled", 2, 2, {}, vec({0.0, 1.0}), 0.0};
    p.residuals = [](const Vector& x) {
      return vec({1e4 * x(0) * x(1) - 1.0, exp(-x(0)) + exp(-x(1)) - 1.0001});
    };
    out.push_back(std::move(p));
  }
  {
    LeastSquaresProblem p{"wood", 4, 6, {}, vec({-3.0, -1.0, -3.0, -1.0}), 0.0};
    p.residuals = [](const Vector& x) {
      return vec({10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0), sqrt(90.0) * (x(3) - x(2) * x(2)), 1.0 - x(2),
                  sqrt(10.0) * (x(1) + x(3) - 2.0), (x(1) - x(3)) / sqrt(10.0)});
    };
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kMultiplicative: return "multiplicative";
    case NoiseKind::kAdditive: return "additive";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "none") return NoiseKind::kNone;
  if (text == "multiplicative") return NoiseKind::kMultiplicative;
  if (text == "additive") return NoiseKind::kAdditive;
  throw InvalidArgument("unknown noise kind '" + std::string(text) + "'");
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kUnconstrained: return "unconstrained";
    case ConstraintKind::kBox: return "box";
    case ConstraintKind::kBall: return "ball";
    case ConstraintKind::kHalfspace: return "halfspace";
  }
  return "unknown";
}

ConstraintKind parse_constraint_kind(std::string_view text) {
  for (auto kind : kAllConstraints) {
    if (text == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown constraint kind '" + std::string(text) + "'");
}

ConvexRegion constraint_region(ConstraintKind kind, Index n) {
  if (n < 1) throw InvalidArgument("constraint_region: dimension must be positive");
  switch (kind) {
    case ConstraintKind::kUnconstrained: return ConvexRegion::whole_space(n);
    case ConstraintKind::kBox: return ConvexRegion::box(Vector::Constant(n, 0.1), Vector::Constant(n, 20.0));
    case ConstraintKind::kBall: return ConvexRegion::ball(Vector::Constant(n, 5.0), 6.9);
    case ConstraintKind::kHalfspace: return ConvexRegion::halfspace(Vector::Ones(n), 1.0);
  }
  throw InvalidArgument("constraint_region: unknown kind");
}

std::array<ConvexRegion, 4> constraint_variants(Index n) {
  return {constraint_region(ConstraintKind::kUnconstrained, n), constraint_region(ConstraintKind::kBox, n),
          constraint_region(ConstraintKind::kBall, n), constraint_region(ConstraintKind::kHalfspace, n)};
}

Vector evaluate(const LeastSquaresProblem& problem, const Vector& x, const NoiseSpec& noise,
                std::mt19937_64& rng, EvaluationLedger& ledger) {
  if (x.size() != problem.n) throw InvalidArgument("evaluate: dimension mismatch for " + problem.name);
  ++ledger.count;
  Vector r = problem.residuals(x);
  if (noise.kind == NoiseKind::kNone || noise.sigma == 0.0) return r;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < r.size(); ++i) {
    const double eps = noise.sigma * normal(rng);
    if (noise.kind == NoiseKind::kMultiplicative) {
      r(i) *= 1.0 + eps;
    } else {
      r(i) += eps;
    }
  }
  return r;
}

NoisyResiduals::NoisyResiduals(const LeastSquaresProblem& problem, const NoiseSpec& noise)
    : problem_(&problem), noise_(noise), rng_(noise.seed) {
  if (noise.sigma < 0.0) throw InvalidArgument("noise: sigma must be nonnegative");
}

Vector NoisyResiduals::operator()(const Vector& x) { return evaluate(*problem_, x, noise_, rng_, ledger_); }

const std::vector<LeastSquaresProblem>& suite() {
  static const std::vector<LeastSquaresProblem> problems = build_suite();
  return problems;
}

const LeastSquaresProblem* find_problem(std::string_view name) {
  for (const auto& p : suite()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace cdfo
