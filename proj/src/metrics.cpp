#include "stdkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "stdkit/error.hpp"

namespace stdkit {

namespace {

bool earlier(const TransitionSegment& a, const TransitionSegment& b) {
  return a.start_s != b.start_s ? a.start_s < b.start_s : a.end_s < b.end_s;
}

// Total length of a union of inclusive integer intervals.
long long union_size(std::vector<FrameSpan> spans) {
  if (spans.empty()) return 0;
  std::sort(spans.begin(), spans.end(),
            [](const FrameSpan& a, const FrameSpan& b) { return a.lo < b.lo; });
  long long total = 0;
  std::int64_t cur_lo = spans.front().lo;
  std::int64_t cur_hi = spans.front().hi;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].lo <= cur_hi + 1) {
      cur_hi = std::max(cur_hi, spans[i].hi);
    } else {
      total += cur_hi - cur_lo + 1;
      cur_lo = spans[i].lo;
      cur_hi = spans[i].hi;
    }
  }
  total += cur_hi - cur_lo + 1;
  return total;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

TransitionCategory categorize(const TransitionSegment& label) {
  const double d = segment_duration(label);
  if (d < 0.1) return TransitionCategory::Cut;
  if (d <= 1.0) return TransitionCategory::Normal;
  return TransitionCategory::Long;
}

const char* category_name(TransitionCategory c) {
  switch (c) {
    case TransitionCategory::Cut: return "Cut";
    case TransitionCategory::Normal: return "Normal";
    default: return "Long";
  }
}

TransitionSegment expand(const TransitionSegment& seg, double tau_s, double duration_s) {
  if (tau_s < 0) throw PreconditionError("tolerance must be >= 0");
  TransitionSegment out = seg;
  out.start_s = std::max(0.0, seg.start_s - tau_s);
  out.end_s = std::min(duration_s, seg.end_s + tau_s);
  return out;
}

std::vector<EvalSegment> prepare_segments(const std::vector<TransitionSegment>& segments,
                                          double tau_s, double duration_s) {
  std::vector<int> order(segments.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return earlier(segments[static_cast<std::size_t>(a)], segments[static_cast<std::size_t>(b)]);
  });

  std::vector<EvalSegment> out;
  for (const int idx : order) {
    const TransitionSegment& orig = segments[static_cast<std::size_t>(idx)];
    const TransitionSegment exp = expand(orig, tau_s, duration_s);
    // union segments the expansion made overlap, so one prediction cannot be
    // double-matched against two merged truths
    if (!out.empty() && exp.start_s < out.back().end_s) {
      EvalSegment& prev = out.back();
      prev.end_s = std::max(prev.end_s, exp.end_s);
      prev.orig_start_s = std::min(prev.orig_start_s, orig.start_s);
      prev.orig_end_s = std::max(prev.orig_end_s, orig.end_s);
      prev.members.push_back(idx);
    } else {
      EvalSegment seg;
      seg.start_s = exp.start_s;
      seg.end_s = exp.end_s;
      seg.orig_start_s = orig.start_s;
      seg.orig_end_s = orig.end_s;
      seg.members = {idx};
      out.push_back(std::move(seg));
    }
  }
  return out;
}

MatchSet greedy_match(const std::vector<EvalSegment>& preds, const std::vector<EvalSegment>& gts) {
  struct Candidate {
    int pred;
    int gt;
    double intersection;
  };
  std::vector<Candidate> candidates;
  for (int pi = 0; pi < static_cast<int>(preds.size()); ++pi) {
    const EvalSegment& p = preds[static_cast<std::size_t>(pi)];
    for (int gi = 0; gi < static_cast<int>(gts.size()); ++gi) {
      const EvalSegment& g = gts[static_cast<std::size_t>(gi)];
      const double inter = std::min(p.end_s, g.end_s) - std::max(p.start_s, g.start_s);
      if (inter > 0) {
        candidates.push_back({pi, gi, inter});
      } else {
        // a point segment touching the other segment's closed interval
        const bool degenerate = p.start_s == p.end_s || g.start_s == g.end_s;
        if (degenerate && std::max(p.start_s, g.start_s) <= std::min(p.end_s, g.end_s)) {
          candidates.push_back({pi, gi, 0.0});
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.intersection != b.intersection) return a.intersection > b.intersection;
    const double ga = gts[static_cast<std::size_t>(a.gt)].start_s;
    const double gb = gts[static_cast<std::size_t>(b.gt)].start_s;
    if (ga != gb) return ga < gb;
    const double pa = preds[static_cast<std::size_t>(a.pred)].start_s;
    const double pb = preds[static_cast<std::size_t>(b.pred)].start_s;
    if (pa != pb) return pa < pb;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.pred < b.pred;
  });

  MatchSet match;
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (const Candidate& c : candidates) {
    if (pred_used[static_cast<std::size_t>(c.pred)] || gt_used[static_cast<std::size_t>(c.gt)]) {
      continue;
    }
    pred_used[static_cast<std::size_t>(c.pred)] = true;
    gt_used[static_cast<std::size_t>(c.gt)] = true;
    match.pairs.push_back({c.pred, c.gt, c.intersection});
  }
  for (int i = 0; i < static_cast<int>(preds.size()); ++i) {
    if (!pred_used[static_cast<std::size_t>(i)]) match.unmatched_preds.push_back(i);
  }
  for (int i = 0; i < static_cast<int>(gts.size()); ++i) {
    if (!gt_used[static_cast<std::size_t>(i)]) match.unmatched_gts.push_back(i);
  }
  return match;
}

Prf prf_from_counts(long long tp, long long fp, long long fn) {
  Prf out;
  out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  out.f1 = out.precision + out.recall > 0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

Prf segment_prf(const MatchSet& match) {
  return prf_from_counts(static_cast<long long>(match.pairs.size()),
                         static_cast<long long>(match.unmatched_preds.size()),
                         static_cast<long long>(match.unmatched_gts.size()));
}

FrameSpan frame_span(double start_s, double end_s, Fps fps) {
  const double hz = fps.hz();
  return {std::llround(start_s * hz), std::llround(end_s * hz)};
}

FrameCounts frame_counts(const MatchSet& match, const std::vector<EvalSegment>& preds,
                         const std::vector<EvalSegment>& gts, Fps fps) {
  std::vector<FrameSpan> tp_spans;
  for (const MatchedPair& pair : match.pairs) {
    const EvalSegment& p = preds[static_cast<std::size_t>(pair.pred)];
    const EvalSegment& g = gts[static_cast<std::size_t>(pair.gt)];
    const FrameSpan ps = frame_span(p.start_s, p.end_s, fps);
    const FrameSpan gs = frame_span(g.start_s, g.end_s, fps);
    const FrameSpan inter{std::max(ps.lo, gs.lo), std::min(ps.hi, gs.hi)};
    if (inter.lo <= inter.hi) tp_spans.push_back(inter);
  }
  std::vector<FrameSpan> pred_spans;
  pred_spans.reserve(preds.size());
  for (const EvalSegment& p : preds) pred_spans.push_back(frame_span(p.start_s, p.end_s, fps));
  std::vector<FrameSpan> gt_spans;
  gt_spans.reserve(gts.size());
  for (const EvalSegment& g : gts) gt_spans.push_back(frame_span(g.start_s, g.end_s, fps));

  FrameCounts out;
  out.tp = union_size(std::move(tp_spans));
  out.fp = union_size(std::move(pred_spans)) - out.tp;
  out.fn = union_size(std::move(gt_spans)) - out.tp;
  return out;
}

std::optional<double> abe(const MatchSet& match, const std::vector<EvalSegment>& preds,
                          const std::vector<EvalSegment>& gts) {
  if (match.pairs.empty()) return std::nullopt;
  double sum = 0.0;
  for (const MatchedPair& pair : match.pairs) {
    const EvalSegment& p = preds[static_cast<std::size_t>(pair.pred)];
    const EvalSegment& g = gts[static_cast<std::size_t>(pair.gt)];
    sum += std::abs(g.orig_start_s - p.orig_start_s) + std::abs(g.orig_end_s - p.orig_end_s);
  }
  return sum / (2.0 * static_cast<double>(match.pairs.size()));
}

double rtf(double inference_s, double video_s) {
  if (video_s <= 0) throw PreconditionError("video duration must be positive");
  return inference_s / video_s;
}

std::optional<double> TauMetrics::abe() const {
  if (abe_boundaries == 0) return std::nullopt;
  return abe_abs_sum / static_cast<double>(abe_boundaries);
}

double TauMetrics::category_recall(TransitionCategory c) const {
  const auto i = static_cast<std::size_t>(c);
  return cat_total[i] > 0 ? static_cast<double>(cat_matched[i]) / static_cast<double>(cat_total[i])
                          : 0.0;
}

Prf TauMetrics::category_frame(TransitionCategory c) const {
  const auto i = static_cast<std::size_t>(c);
  return prf_from_counts(cat_frames[i].tp, cat_frames[i].fp, cat_frames[i].fn);
}

void TauMetrics::add(const TauMetrics& other) {
  seg_tp += other.seg_tp;
  seg_fp += other.seg_fp;
  seg_fn += other.seg_fn;
  frame_tp += other.frame_tp;
  frame_fp += other.frame_fp;
  frame_fn += other.frame_fn;
  abe_abs_sum += other.abe_abs_sum;
  abe_boundaries += other.abe_boundaries;
  for (std::size_t i = 0; i < 3; ++i) {
    cat_matched[i] += other.cat_matched[i];
    cat_total[i] += other.cat_total[i];
    cat_frames[i].tp += other.cat_frames[i].tp;
    cat_frames[i].fp += other.cat_frames[i].fp;
    cat_frames[i].fn += other.cat_frames[i].fn;
  }
}

double MetricsReport::rtf() const { return video_s > 0 ? inference_s / video_s : 0.0; }

Prf MetricsReport::seg_mean() const {
  Prf mean;
  if (rows.empty()) return mean;
  for (const TauMetrics& row : rows) {
    const Prf p = row.seg();
    mean.precision += p.precision;
    mean.recall += p.recall;
    mean.f1 += p.f1;
  }
  const auto n = static_cast<double>(rows.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

Prf MetricsReport::frame_mean() const {
  Prf mean;
  if (rows.empty()) return mean;
  for (const TauMetrics& row : rows) {
    const Prf p = row.frame();
    mean.precision += p.precision;
    mean.recall += p.recall;
    mean.f1 += p.f1;
  }
  const auto n = static_cast<double>(rows.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

std::optional<double> MetricsReport::abe_mean() const {
  double sum = 0.0;
  int n = 0;
  for (const TauMetrics& row : rows) {
    if (const auto v = row.abe()) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

void MetricsReport::add(const MetricsReport& other) {
  if (rows.empty()) {
    rows = other.rows;
  } else {
    if (rows.size() != other.rows.size()) {
      throw PreconditionError("cannot aggregate reports over different tau grids");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].add(other.rows[i]);
  }
  inference_s += other.inference_s;
  video_s += other.video_s;
}

const std::vector<double>& default_tau_grid() {
  static const std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  return grid;
}

MetricsReport evaluate(const DetectionResult& preds, const std::vector<TransitionSegment>& labels,
                       Fps fps, double duration_s, const std::vector<double>& tau_grid) {
  if (duration_s <= 0) throw PreconditionError("duration must be positive");
  if (tau_grid.empty()) throw PreconditionError("tau grid must not be empty");

  MetricsReport report;
  report.inference_s = preds.wall_time_s;
  report.video_s = duration_s;
  report.rows.reserve(tau_grid.size());

  for (const double tau : tau_grid) {
    TauMetrics row;
    row.tau = tau;

    const std::vector<EvalSegment> pe = prepare_segments(preds.segments, tau, duration_s);
    const std::vector<EvalSegment> ge = prepare_segments(labels, tau, duration_s);
    const MatchSet match = greedy_match(pe, ge);

    row.seg_tp = static_cast<long long>(match.pairs.size());
    row.seg_fp = static_cast<long long>(match.unmatched_preds.size());
    row.seg_fn = static_cast<long long>(match.unmatched_gts.size());

    const FrameCounts fc = frame_counts(match, pe, ge, fps);
    row.frame_tp = fc.tp;
    row.frame_fp = fc.fp;
    row.frame_fn = fc.fn;

    for (const MatchedPair& pair : match.pairs) {
      const EvalSegment& p = pe[static_cast<std::size_t>(pair.pred)];
      const EvalSegment& g = ge[static_cast<std::size_t>(pair.gt)];
      row.abe_abs_sum +=
          std::abs(g.orig_start_s - p.orig_start_s) + std::abs(g.orig_end_s - p.orig_end_s);
      row.abe_boundaries += 2;
    }

    // Per-category breakdown: the predictions evaluated against that duration
    // bucket's ground truth only.
    for (int c = 0; c < 3; ++c) {
      std::vector<TransitionSegment> bucket;
      for (const TransitionSegment& label : labels) {
        if (categorize(label) == static_cast<TransitionCategory>(c)) bucket.push_back(label);
      }
      row.cat_total[static_cast<std::size_t>(c)] = static_cast<long long>(bucket.size());
      if (bucket.empty()) continue;
      const std::vector<EvalSegment> be = prepare_segments(bucket, tau, duration_s);
      const MatchSet bucket_match = greedy_match(pe, be);
      long long matched_originals = 0;
      for (const MatchedPair& pair : bucket_match.pairs) {
        matched_originals +=
            static_cast<long long>(be[static_cast<std::size_t>(pair.gt)].members.size());
      }
      row.cat_matched[static_cast<std::size_t>(c)] = matched_originals;
      row.cat_frames[static_cast<std::size_t>(c)] = frame_counts(bucket_match, pe, be, fps);
    }

    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_csv(const MetricsReport& report, const std::string& video,
                       const std::string& dataset, bool with_header) {
  std::ostringstream out;
  if (with_header) {
    out << "video,dataset,tau,seg_precision,seg_recall,seg_f1,"
           "frame_precision,frame_recall,frame_f1,abe_s,rtf,"
           "cut_recall,normal_recall,long_recall,long_frame_f1\n";
  }
  const auto cat_recall = [](const TauMetrics& row, TransitionCategory c) {
    return row.cat_total[static_cast<std::size_t>(c)] > 0
               ? std::optional<double>(row.category_recall(c))
               : std::nullopt;
  };
  const auto cat_mean = [&](TransitionCategory c,
                            auto&& value) -> std::optional<double> {
    double sum = 0;
    int n = 0;
    for (const TauMetrics& row : report.rows) {
      if (row.cat_total[static_cast<std::size_t>(c)] == 0) continue;
      sum += value(row, c);
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };
  const auto emit = [&](const std::string& tau, const Prf& seg, const Prf& frame,
                        const std::optional<double>& abe_v, const std::optional<double>& cut_r,
                        const std::optional<double>& normal_r, const std::optional<double>& long_r,
                        const std::optional<double>& long_f1) {
    out << video << ',' << dataset << ',' << tau << ',' << fmt(seg.precision) << ','
        << fmt(seg.recall) << ',' << fmt(seg.f1) << ',' << fmt(frame.precision) << ','
        << fmt(frame.recall) << ',' << fmt(frame.f1) << ',' << fmt_opt(abe_v) << ','
        << fmt(report.rtf()) << ',' << fmt_opt(cut_r) << ',' << fmt_opt(normal_r) << ','
        << fmt_opt(long_r) << ',' << fmt_opt(long_f1) << '\n';
  };
  for (const TauMetrics& row : report.rows) {
    emit(fmt(row.tau), row.seg(), row.frame(), row.abe(),
         cat_recall(row, TransitionCategory::Cut), cat_recall(row, TransitionCategory::Normal),
         cat_recall(row, TransitionCategory::Long),
         row.cat_total[static_cast<std::size_t>(TransitionCategory::Long)] > 0
             ? std::optional<double>(row.category_frame(TransitionCategory::Long).f1)
             : std::nullopt);
  }
  const auto recall_of = [](const TauMetrics& row, TransitionCategory c) {
    return row.category_recall(c);
  };
  const auto long_f1_of = [](const TauMetrics& row, TransitionCategory c) {
    return row.category_frame(c).f1;
  };
  emit("mean", report.seg_mean(), report.frame_mean(), report.abe_mean(),
       cat_mean(TransitionCategory::Cut, recall_of), cat_mean(TransitionCategory::Normal, recall_of),
       cat_mean(TransitionCategory::Long, recall_of),
       cat_mean(TransitionCategory::Long, long_f1_of));
  return out.str();
}

std::string report_table(const MetricsReport& report, const std::string& title) {
  std::ostringstream out;
  out << title << '\n';
  out << "  tau   | Seg P   Seg R   Seg F1 | Frm P   Frm R   Frm F1 | ABE(s)  | RTF\n";
  out << "  ------+------------------------+------------------------+---------+------\n";
  const auto line = [&](const std::string& tau, const Prf& seg, const Prf& frame,
                        const std::optional<double>& abe_v) {
    out << "  " << std::left << std::setw(6) << tau << "| " << fmt(seg.precision) << "  "
        << fmt(seg.recall) << "  " << fmt(seg.f1) << " | " << fmt(frame.precision) << "  "
        << fmt(frame.recall) << "  " << fmt(frame.f1) << " | " << std::setw(8)
        << (abe_v ? fmt(*abe_v) : std::string("-")) << "| " << fmt(report.rtf()) << '\n';
  };
  for (const TauMetrics& row : report.rows) {
    line(fmt(row.tau).substr(0, 3), row.seg(), row.frame(), row.abe());
  }
  line("mean", report.seg_mean(), report.frame_mean(), report.abe_mean());
  out << "  per-category segment recall (mean over tau):\n";
  for (int c = 0; c < 3; ++c) {
    double r = 0;
    long long total = 0;
    for (const TauMetrics& row : report.rows) {
      r += row.category_recall(static_cast<TransitionCategory>(c));
      total = std::max(total, row.cat_total[static_cast<std::size_t>(c)]);
    }
    r /= static_cast<double>(report.rows.empty() ? 1 : report.rows.size());
    out << "    " << std::left << std::setw(7) << category_name(static_cast<TransitionCategory>(c))
        << " recall " << fmt(r) << "  (n=" << total << ")\n";
  }
  return out.str();
}

}  // namespace stdkit
