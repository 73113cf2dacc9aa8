#include <benchmark/benchmark.h>

#include "qva/field.h"
#include "qva/formal.h"
#include "qva/verify.h"

using namespace qva;

namespace {

AlgebraSpec spec(const char* name) { return load_spec(std::string(QVA_FIXTURE_DIR) + "/" + name + ".alg"); }

// Straightening a(n) on every basis state, cold cache each iteration.
void BM_Straighten(benchmark::State& st, const char* name) {
  const AlgebraSpec s = spec(name);
  const int level = static_cast<int>(st.range(0));
  for (auto _ : st) {
    ModuleEngine M(s);
    std::size_t terms = 0;
    for (const auto& m : M.enumerate_basis(level))
      for (int a = 0; a < s.size(); ++a)
        for (int n = -2; n <= 2; ++n) terms += M.apply_mode(a, n, m).size();
    benchmark::DoNotOptimize(terms);
  }
}
BENCHMARK_CAPTURE(BM_Straighten, affine, "sl2-affine")->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Straighten, zf, "zf-nilpotent")->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_VertexOperatorModes(benchmark::State& st) {
  const AlgebraSpec s = spec("sl2-affine");
  for (auto _ : st) {
    ModuleEngine M(s);
    FieldEngine F(M);
    const auto basis = M.enumerate_basis(2);
    std::size_t terms = 0;
    for (const auto& v : basis)
      for (const auto& w : basis) terms += F.mode(v, 0, w).size();
    benchmark::DoNotOptimize(terms);
  }
}
BENCHMARK(BM_VertexOperatorModes)->Unit(benchmark::kMillisecond);

void BM_IotaExpand(benchmark::State& st) {
  const std::vector<std::string> vars{"x1", "x2"};
  const int w = static_cast<int>(st.range(0));
  const auto f = DirectedRational::difference(vars, VarOrder(vars), "x1", "x2", -3);
  for (auto _ : st) benchmark::DoNotOptimize(iota_expand(f, Box::cube(2, -w, w)).terms().size());
}
BENCHMARK(BM_IotaExpand)->Arg(8)->Arg(16)->Arg(32);

void BM_FindSlocality(benchmark::State& st) {
  const AlgebraSpec s = spec("sl2-halfcurrent");
  for (auto _ : st) {
    Context ctx(s);
    benchmark::DoNotOptimize(find_slocality(ctx, s.index("e"), s.index("f"), 4, 2, 1, 3).k);
  }
}
BENCHMARK(BM_FindSlocality)->Unit(benchmark::kMillisecond);

void BM_Qyb(benchmark::State& st) {
  const AlgebraSpec s = spec("sl2-halfcurrent");
  const SMap S = induced_smap(s);
  const std::vector<int> basis{kVacuum, 0, 1, 2};
  const int order = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(check_qyb(s, S, basis, order).status);
}
BENCHMARK(BM_Qyb)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ProbeZ(benchmark::State& st) {
  const AlgebraSpec s = spec("heisenberg-rank1");
  for (auto _ : st) {
    Context ctx(s);
    benchmark::DoNotOptimize(nondegeneracy_probe(ctx, 2, static_cast<int>(st.range(0)), 3, 2).status);
  }
}
BENCHMARK(BM_ProbeZ)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ExactKernel(benchmark::State& st) {
  // dependent columns of a random-ish integer matrix
  const int n = static_cast<int>(st.range(0));
  std::vector<SparseVec> cols;
  for (int j = 0; j < n; ++j) {
    SparseVec v;
    for (int i = 0; i < n / 2; ++i)
      if ((i * 7 + j * 13) % 5 != 0) v.emplace_back(i, Rational((i * j) % 11 - 5));
    cols.push_back(v);
  }
  for (auto _ : st) benchmark::DoNotOptimize(exact_kernel(cols).rank);
}
BENCHMARK(BM_ExactKernel)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
