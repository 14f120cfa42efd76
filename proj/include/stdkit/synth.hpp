#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stdkit/segment.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

enum class Easing { linear, fast, slow, smooth };

// One planned transition between an adjacent shot pair. Durations are already
// quantized to whole frame intervals so that splicing, labels and duration
// bookkeeping stay exact on the fixed-fps timeline; "cut" always has 0.
struct EffectSpec {
  std::string effect;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  Easing easing = Easing::linear;
};

struct SynthPlan {
  std::vector<EffectSpec> specs;  // one per adjacent shot pair
  std::uint64_t seed = 0;
};

// The 59 supported transition identifiers ("cut" included).
const std::vector<std::string>& effect_catalog();
bool is_known_effect(std::string_view effect);
Easing easing_for(std::string_view effect);

// Upper bound for a sampled transition duration: min(cap, dur_a/2, dur_b/2).
// Halving both sides guarantees the rendered overlap never exhausts a shot
// even when it carries a transition on each end.
double compute_tmax(double dur_a_s, double dur_b_s, double cap_s);

// Samples one transition per adjacent pair: the effect uniformly from the
// catalog, the duration uniformly from [0, T_max] (overridden to 0 for cuts)
// and then quantized to whole frames. A non-negative long_fraction stratifies
// the draw: with that probability the duration is sampled from the >1s range
// the pair allows, otherwise from the complement.
SynthPlan sample_plan_for_durations(const std::vector<std::int64_t>& shot_frames, Fps fps,
                                    std::uint64_t seed, double cap_s,
                                    double long_fraction = -1.0);
SynthPlan sample_plan(const std::vector<VideoClip>& shots, std::uint64_t seed, double cap_s,
                      double long_fraction = -1.0);

// Renders one transition frame at progress p in [0, 1]. p == 0 returns
// out_frame byte-exactly and p == 1 returns in_frame byte-exactly, for every
// effect. Deterministic in (inputs, effect, p, seed).
Frame render_transition(const Frame& out_frame, const Frame& in_frame, std::string_view effect,
                        double p, std::uint64_t seed);

struct SynthResult {
  VideoClip clip;
  std::vector<TransitionSegment> labels;
};

// Overlap splice: a transition of duration d between shots A and B occupies
// [t_A_end - d, t_A_end] on the running timeline, so the output duration is
// the shot total minus the transition total. Every frame strictly outside a
// label span is a byte-exact copy of a source-shot frame.
SynthResult synthesize(const std::vector<VideoClip>& shots, const SynthPlan& plan);

}  // namespace stdkit
