#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbboost/boost.hpp"
#include "cbboost/error.hpp"

namespace cbboost {

std::size_t PropositionReport::count(int proposition) const
{
    std::size_t c = 0;
    for (const auto& v : violations)
        if (v.proposition == proposition)
            ++c;
    return c;
}

namespace {

std::string describe(double before, double after)
{
    std::ostringstream os;
    os.precision(17);
    os << "|w1 - w2| " << before << " -> " << after;
    return os.str();
}

} // namespace

PropositionReport check_propositions(const BoostTrace& trace, const PropositionOptions& options)
{
    PropositionReport report;
    const std::size_t n = trace.labels.size();
    for (std::size_t m = 0; m < trace.steps.size(); ++m) {
        const TraceStep& s = trace.steps[m];
        if (s.w1.size() != n || s.w2.size() != n || s.next_w1.size() != n || s.next_w2.size() != n
            || s.predictions.size() != n || s.effective_labels.size() != n || s.distribution.size() != n)
            throw Error("propositions", "trace step " + std::to_string(m + 1) + " has inconsistent lengths");
        ++report.iterations_checked;
        const double grow = std::exp(s.beta);

        for (std::size_t i = 0; i < n; ++i) {
            const double w1 = s.w1[i];
            const double w2 = s.w2[i];
            const double before = std::abs(w1 - w2);
            const double after = std::abs(s.next_w1[i] - s.next_w2[i]);
            const double slack = options.weight_tolerance * (w1 + w2);

            if (s.predictions[i] != s.effective_labels[i]) {
                ++report.first_checks;
                // The exact increase is at least (w1 + w2)(1 - e^-beta), far above rounding once
                // beta > 1e-12; below that only a decrease beyond the slack counts.
                if (after - before < -slack || (after <= before && s.beta > 1e-12))
                    report.violations.push_back({1, m + 1, i, describe(before, after)});
                continue;
            }

            bool premise = false;
            if (options.reading == SecondPropositionReading::symmetric) {
                premise = std::max(w1, w2) > grow * std::min(w1, w2);
            } else {
                // Literal reading: both cases test w1 > e^beta w2, which is vacuous when w1 < w2.
                const bool case_one = w1 > w2 && s.predictions[i] == trace.labels[i];
                const bool case_two = w1 < w2 && s.predictions[i] == -trace.labels[i];
                premise = (case_one || case_two) && w1 > grow * w2;
            }
            if (premise) {
                ++report.second_checks;
                // The decrease vanishes at the premise boundary, so only growth beyond the slack counts.
                if (after - before > slack)
                    report.violations.push_back({2, m + 1, i, describe(before, after)});
            }
        }

        // Third proposition: the CB coefficient never exceeds the AdaBoost-style one on the same (D, h).
        // c is the weight shared by numerator and denominator of beta; instances with w1 == w2
        // contribute to it too.
        double c = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c += std::min(s.w1[i], s.w2[i]);
            scale += s.w1[i] + s.w2[i];
        }
        const double eps = std::clamp(s.weighted_error, trace.epsilon_clamp, 1.0 - trace.epsilon_clamp);
        const double bound = 0.5 * std::log((1.0 - eps) / eps);
        std::ostringstream detail;
        detail.precision(17);
        detail << "beta " << s.beta << " vs bound " << bound << " (c = " << c << ")";
        if (c > options.beta_tolerance * scale) {
            ++report.third_strict_checks;
            if (!(s.beta < bound))
                report.violations.push_back({3, m + 1, std::nullopt, detail.str()});
        } else if (c == 0.0) {
            ++report.third_equality_checks;
            if (std::abs(s.beta - bound) > options.beta_tolerance)
                report.violations.push_back({3, m + 1, std::nullopt, detail.str()});
        } else if (s.beta > bound + options.beta_tolerance) {
            report.violations.push_back({3, m + 1, std::nullopt, detail.str()});
        }
    }
    return report;
}

} // namespace cbboost
