#include <benchmark/benchmark.h>

#include <vector>

#include "stmd/classical.hpp"
#include "stmd/detectors.hpp"
#include "stmd/eval.hpp"
#include "stmd/frontend.hpp"
#include "stmd/stmdnet.hpp"
#include "stmd/synthgen.hpp"

using namespace stmd;

namespace {

// 270 x 480 frames, the size used for the per-frame timing figures.
const Sequence& scene() {
    static const Sequence seq = [] {
        SynthConfig sc;
        sc.width = 480;
        sc.height = 270;
        sc.frames = 40;
        sc.target_path = CircularPath{{240.0, 135.0}, 80.0, 0.02, 0.0};
        return generate_sequence(sc);
    }();
    return seq;
}

FrameRing retina_history(std::size_t depth) {
    const RetinaConfig rc;
    FrameRing ring(depth);
    for (std::size_t i = 0; i < depth; ++i) ring.push(static_cast<std::int64_t>(i), retina_smooth(scene().frames[i], rc));
    return ring;
}

OnOffSignals signals() {
    const LaminaConfig lc;
    return rectify_pair(lamina_filter(retina_history(lc.memory), lc));
}

void BM_Retina(benchmark::State& state) {
    const RetinaConfig rc;
    for (auto _ : state) benchmark::DoNotOptimize(retina_smooth(scene().frames[0], rc));
}
BENCHMARK(BM_Retina)->Unit(benchmark::kMillisecond);

void BM_LaminaFractional(benchmark::State& state) {
    const LaminaConfig lc;
    const FrameRing ring = retina_history(lc.memory);
    const Lamina lamina(lc);
    for (auto _ : state) benchmark::DoNotOptimize(lamina.apply(ring));
}
BENCHMARK(BM_LaminaFractional)->Unit(benchmark::kMillisecond);

void BM_Medulla(benchmark::State& state) {
    const MedullaConfig mc;
    const OnOffSignals in = signals();
    DualDynamics dd = DualDynamics::zeros(in.on.height(), in.on.width());
    for (auto _ : state) {
        dd = medulla_step(in, dd, mc);
        benchmark::DoNotOptimize(dd);
    }
}
BENCHMARK(BM_Medulla)->Unit(benchmark::kMillisecond);

DualDynamics settled() {
    const OnOffSignals in = signals();
    DualDynamics dd = DualDynamics::zeros(in.on.height(), in.on.width());
    for (int i = 0; i < 5; ++i) dd = medulla_step(in, dd, MedullaConfig{});
    return dd;
}

void BM_Locate(benchmark::State& state) {
    const DualDynamics dd = settled();
    for (auto _ : state) benchmark::DoNotOptimize(lobula_locate(dd));
}
BENCHMARK(BM_Locate)->Unit(benchmark::kMicrosecond);

void BM_LdfcEncodeDecode(benchmark::State& state) {
    const DualDynamics dd = settled();
    const LdfcConfig lc;
    const Grid2D locate = lobula_locate(dd);
    for (auto _ : state) benchmark::DoNotOptimize(direction_decode(ldfc_encode(dd, lc), locate, lc));
}
BENCHMARK(BM_LdfcEncodeDecode)->Unit(benchmark::kMillisecond);

void BM_Feedback(benchmark::State& state) {
    const FeedbackConfig fc;
    const Grid2D locate = lobula_locate(settled());
    FrameRing history(fc.fb_delay);
    history.push(0, locate);
    for (auto _ : state) benchmark::DoNotOptimize(feedback_apply(locate, history, fc));
}
BENCHMARK(BM_Feedback)->Unit(benchmark::kMillisecond);

void BM_EstmdCorrelate(benchmark::State& state) {
    const Grid2D lam = lamina_filter(retina_history(2), LaminaConfig{LaminaMode::plain_diff, 1.0, 2});
    OnOffRing ring(5);
    for (std::int64_t i = 0; i < 5; ++i) ring.push(i, rectify_pair(lam));
    for (auto _ : state) benchmark::DoNotOptimize(estmd_detect(ring, 4));
}
BENCHMARK(BM_EstmdCorrelate)->Unit(benchmark::kMicrosecond);

void BM_DstmdCorrelate(benchmark::State& state) {
    const Grid2D lam = lamina_filter(retina_history(2), LaminaConfig{LaminaMode::plain_diff, 1.0, 2});
    const DstmdConfig dc;
    OnOffRing ring(dc.max_delay() + 1);
    for (std::size_t i = 0; i <= dc.max_delay(); ++i) ring.push(static_cast<std::int64_t>(i), rectify_pair(lam));
    for (auto _ : state) benchmark::DoNotOptimize(dstmd_detect(ring, dc));
}
BENCHMARK(BM_DstmdCorrelate)->Unit(benchmark::kMillisecond);

void BM_ExtractDetections(benchmark::State& state) {
    const Grid2D locate = lobula_locate(settled());
    const MatchingConfig mc;
    for (auto _ : state) benchmark::DoNotOptimize(extract_detections(locate, 0.0, mc));
}
BENCHMARK(BM_ExtractDetections)->Unit(benchmark::kMillisecond);

// Whole detector, one frame per iteration, cycling through the scene.
void BM_Detector(benchmark::State& state) {
    const auto kind = static_cast<DetectorKind>(state.range(0));
    auto det = make_detector(kind, PipelineConfig{});
    const auto& frames = scene().frames;
    for (std::size_t i = 0; i < 12; ++i) det->step(frames[i]);
    std::size_t n = 12;
    for (auto _ : state) {
        benchmark::DoNotOptimize(det->step(frames[n]));
        n = n + 1 < frames.size() ? n + 1 : 12;
    }
    state.SetLabel(det->name());
}
BENCHMARK(BM_Detector)
    ->Arg(static_cast<int>(DetectorKind::stmdnet))
    ->Arg(static_cast<int>(DetectorKind::stmdnet_f))
    ->Arg(static_cast<int>(DetectorKind::estmd))
    ->Arg(static_cast<int>(DetectorKind::dstmd))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
