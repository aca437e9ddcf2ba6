#include <benchmark/benchmark.h>

#include <levycalc/factorization.hpp>
#include <levycalc/simulation.hpp>

using namespace levycalc;

namespace {

Vec e1() { return Vec::Constant(1, 1.0); }

LevyTriplet cpoisson() {
    return LevyTriplet(e1(), Mat::Zero(1, 1), LevyMeasure::discrete(1, {{0.4 * e1(), 1.2}, {-2.5 * e1(), 0.6}}));
}

void BM_ExponentTriplet(benchmark::State& state) {
    const auto t = LevyTriplet::pure_jump(LevyMeasure::gamma(1.0, 1.0, e1()));
    const Vec y = 1.3 * e1();
    for (auto _ : state) benchmark::DoNotOptimize(eval_exponent(t, y));
}
BENCHMARK(BM_ExponentTriplet);

void BM_ApplyJ(benchmark::State& state) {
    const auto j = Exponent::apply_j(Exponent::from_triplet(cpoisson()));
    const Vec y = 2.0 * e1();
    for (auto _ : state) benchmark::DoNotOptimize(j(y));
}
BENCHMARK(BM_ApplyJ);

void BM_ApplyI(benchmark::State& state) {
    const auto i = Exponent::apply_i(Exponent::from_triplet(cpoisson()));
    const Vec y = 2.0 * e1();
    for (auto _ : state) benchmark::DoNotOptimize(i(y));
}
BENCHMARK(BM_ApplyI);

void BM_JPower(benchmark::State& state) {
    const auto jk = Exponent::apply_j_power(Exponent::laplace(e1()), static_cast<int>(state.range(0)));
    const Vec y = 2.0 * e1();
    for (auto _ : state) benchmark::DoNotOptimize(jk(y));
}
BENCHMARK(BM_JPower)->Arg(2)->Arg(4)->Arg(8);

void BM_Normalize(benchmark::State& state) {
    const auto e = OperatorExpr::parse("(compose (sub id J) (add id I) (compose J I J) (dilate 2))");
    for (auto _ : state) benchmark::DoNotOptimize(normalize_operator_expr(e));
}
BENCHMARK(BM_Normalize);

void BM_FactorizeGamma(benchmark::State& state) {
    const auto phi = Exponent::gamma(1.0, 1.0, e1());
    for (auto _ : state) benchmark::DoNotOptimize(factorize_selfdec(phi));
}
BENCHMARK(BM_FactorizeGamma)->Unit(benchmark::kMillisecond);

void BM_SampleClassU(benchmark::State& state) {
    LevyProcessSpec spec;
    spec.triplet = *Exponent::laplace(e1()).triplet();
    SampleOptions opt;
    opt.workers = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_class_U(spec, ++seed, 1000, opt));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleClassU)->Unit(benchmark::kMillisecond);

void BM_SampleClassL(benchmark::State& state) {
    LevyProcessSpec spec;
    spec.triplet = *Exponent::gamma(1.0, 1.0, e1()).triplet();
    SampleOptions opt;
    opt.workers = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_class_L(spec, ++seed, 1000, 0.0, opt));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleClassL)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
