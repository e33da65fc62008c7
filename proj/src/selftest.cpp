#include "onebit/selftest.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "onebit/harness.hpp"
#include "onebit/probes.hpp"
#include "onebit/recon.hpp"
#include "onebit/sparse_ops.hpp"

namespace onebit {

namespace {

struct Check {
  const char* name;
  std::function<bool()> body;
};

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

template <class Fn>
bool throws_invalid(Fn fn) {
  try {
    fn();
  } catch (const InvalidArgument&) {
    return true;
  }
  return false;
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all{
      {"gaussian matrix determinism",
       [] { return gen_gaussian_matrix(7, 100, 50).matrix() == gen_gaussian_matrix(7, 100, 50).matrix(); }},
      {"gaussian matrix seeds differ",
       [] { return gen_gaussian_matrix(7, 100, 50).matrix() != gen_gaussian_matrix(8, 100, 50).matrix(); }},
      {"gaussian matrix moments",
       [] {
         const auto ensemble = gen_gaussian_matrix(1, 10000, 1);
         const auto& a = ensemble.matrix();
         const double mean = a.mean();
         const double var = (a.array() - mean).square().sum() / static_cast<double>(a.size() - 1);
         return std::abs(mean) < 0.04 && var > 0.94 && var < 1.06;
       }},
      {"flat signal",
       [] {
         const auto x = gen_sparse_signal(0, 4, 4, SupportRule::first_s, ValueRule::flat);
         return (x.values() - Vector::Constant(4, 0.5)).cwiseAbs().maxCoeff() <= 1e-15;
       }},
      {"signal sparsity and norm",
       [] {
         const auto x = gen_sparse_signal(3, 100, 5);
         return (x.values().array() != 0.0).count() == 5 && near(x.values().norm(), 1.0, 1e-12);
       }},
      {"signal s > N rejected", [] { return throws_invalid([] { gen_sparse_signal(0, 3, 4); }); }},
      {"sign convention",
       [] {
         const auto b = sign_quantize(vec({2.5, -0.1, 0.0}));
         return b[0] == 1 && b[1] == -1 && b[2] == -1;
       }},
      {"measurement scale invariance",
       [] {
         const auto a = gen_gaussian_matrix(5, 64, 20);
         const Vector x = gen_sparse_signal(6, 20, 3).values();
         return measure(a, x) == measure(a, 3.0 * x);
       }},
      {"hard threshold examples",
       [] {
         return hard_threshold(vec({3, -4, 1}), 2) == vec({3, -4, 0}) &&
                hard_threshold(vec({2, -2, 0}), 1) == vec({2, 0, 0});
       }},
      {"normalize example", [] { return (normalize(vec({3, 4})) - vec({0.6, 0.8})).norm() <= 1e-15; }},
      {"dual norm example", [] { return near(sparse_dual_norm(vec({3, 4, 1}), 1), 5.0, 1e-12); }},
      {"geodesic distance examples",
       [] {
         const Vector e1 = vec({1, 0});
         const Vector e2 = vec({0, 1});
         return geodesic_distance(e1, e1) == 0.0 && near(geodesic_distance(e1, -e1), 1.0, 1e-15) &&
                near(geodesic_distance(e1, e2), 0.5, 1e-15);
       }},
      {"hamming distance example",
       [] {
         return hamming_distance(BinaryObservation({1, 1, 1, 1}), BinaryObservation({1, -1, 1, 1})) ==
                0.25;
       }},
      {"nbiht fixed point at sign consistency",
       [] {
         const auto a = gen_gaussian_matrix(11, 40, 10);
         const auto x = gen_sparse_signal(12, 10, 2);
         const auto b = measure(a, x.values());
         return nbiht_step(a, b, x, kUnbiasedStep, 2).values() == x.values();
       }},
      {"nbiht iterates unit and sparse",
       [] {
         const auto a = gen_gaussian_matrix(13, 256, 64);
         const auto x = gen_sparse_signal(14, 64, 3);
         AlgorithmConfig cfg;
         cfg.sparsity = 3;
         cfg.max_iters = 50;
         cfg.init = RandomSparseInit{15};
         const auto trace = nbiht_run(a, measure(a, x.values()), cfg, x);
         for (const auto& it : trace.iterates)
           if (!near(it.norm(), 1.0, 1e-10) || (it.array() != 0.0).count() > 3) return false;
         return true;
       }},
      {"iht fixed point at truth",
       [] {
         const auto a = gen_gaussian_matrix(16, 60, 30);
         const auto x = gen_sparse_signal(17, 30, 2);
         AlgorithmConfig cfg;
         cfg.sparsity = 2;
         cfg.init = ProvidedInit{x.values()};
         const auto trace = iht_run(a, a.matrix() * x.values(), cfg, x);
         return trace.iterates.back() == x.values();
       }},
      {"one-shot in dimension one",
       [] {
         const auto a = gen_gaussian_matrix(18, 9, 1);
         const auto est = one_shot_estimate(a, BinaryObservation({1, -1, 1, 1, -1, -1, 1, -1, -1}), 1);
         return std::abs(est.values()[0]) == 1.0;
       }},
      {"unbiasedness scalar case",
       [] { return check_unbiasedness(vec({1.0}), 10000, 10, 19) <= 0.02; }},
      {"unbiasedness guard",
       [] { return throws_invalid([] { check_unbiasedness(vec({1.0}), 10, 10, 0); }); }},
      {"embedding identical and antipodal pairs",
       [] {
         return check_embedding(32, 3, 256, 20, 20, PairMode::identical) == 0.0 &&
                check_embedding(32, 3, 256, 20, 21, PairMode::antipodal) == 0.0;
       }},
      {"decomposition orthogonal case",
       [] {
         const auto r = decomposition_check(vec({1, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}));
         return r.recon_residual <= 1e-15 && r.ortho_u <= 1e-15 && r.ortho_v <= 1e-15;
       }},
      {"projection inequality search",
       [] { return projection_inequality_check(1000, 64, 3, 22) <= 1e-10; }},
      {"width in dimension one",
       [] { return near(gaussian_width_estimate(1, 1, 10000, 23), std::sqrt(2.0 / M_PI), 0.02 * 0.7979); }},
      {"exponent curve tends to one",
       [] {
         for (int k = 25; k < 2500; k += 25)
           if (!(decay_exponent(k) > decay_exponent(k - 25))) return false;
         return near(decay_exponent(25000), 1.0, 1e-12);
       }},
      {"schedule recurrence",
       [] {
         const TheorySchedule t = theory_schedule(1e80, 512, 4);
         for (std::size_t i = 0; i + 1 < t.r.size(); ++i) {
           const long double lhs = static_cast<long double>(t.r[i + 1]) * t.r[i + 1];
           const long double rhs = 600.0L * t.constants.effective_c10() * std::log(1e80L) * t.r[i] *
                                   t.delta[i] * t.c_nsm;
           if (std::abs(lhs / rhs - 1.0L) > 1e-9L) return false;
         }
         return true;
       }},
      {"slope fit on exact power law",
       [] {
         std::vector<SweepRecord> recs;
         for (Index m : {100, 200, 400, 800}) {
           SweepRecord r;
           r.algorithm = "nbiht";
           r.m = m;
           r.final_l2_error = 10.0 / static_cast<double>(m);
           recs.push_back(r);
         }
         const auto fit = fit_slope(recs, "nbiht");
         return near(fit.slope, -1.0, 1e-9) && near(fit.r_squared, 1.0, 1e-9);
       }},
      {"sweep cardinality",
       [] {
         SweepConfig cfg;
         cfg.n = 32;
         cfg.s = 2;
         cfg.m_grid = {64, 128};
         cfg.algorithms = {Algorithm::nbiht};
         cfg.trials_per_cell = 2;
         cfg.max_iters = 20;
         cfg.workers = 1;
         return run_sweep(cfg).records.size() == 4;
       }},
  };
  return all;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int failures = 0;
  for (const auto& check : checks()) {
    bool ok = false;
    std::string note;
    try {
      ok = check.body();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    if (!ok) ++failures;
    out << (ok ? "PASS " : "FAIL ") << check.name << note << '\n';
  }
  return failures;
}

}  // namespace onebit
