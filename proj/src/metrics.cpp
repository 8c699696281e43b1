#include "qfilter/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "qfilter/errors.hpp"

namespace qfilter {

namespace {

PrReF1 from_counts(long long answered, long long correct_answered,
                   long long total) {
    PrReF1 m;
    m.answered = answered;
    m.correct_answered = correct_answered;
    m.total = total;
    m.recall = static_cast<double>(correct_answered) /
               static_cast<double>(total);
    if (answered > 0) {
        m.precision = static_cast<double>(correct_answered) /
                      static_cast<double>(answered);
        const double pr = *m.precision + m.recall;
        if (pr > 0.0) m.f1 = 2.0 * *m.precision * m.recall / pr;
    }
    return m;
}

void check_taus(const std::vector<double>& taus) {
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] >= 0.0 && taus[i] <= 1.0))
            throw domain_error("tau out of [0,1]");
        if (i && taus[i] < taus[i - 1])
            throw domain_error("taus must be sorted ascending");
    }
}

}  // namespace

PrReF1 evaluate(const std::vector<Decision>& decisions) {
    if (decisions.empty()) throw domain_error("evaluate needs at least one decision");

    long long answered = 0;
    long long correct_answered = 0;
    for (const Decision& d : decisions) {
        if (!d.answered) continue;
        if (!d.correct)
            throw domain_error("decision \"" + d.question_id +
                               "\" is answered but has no correctness label");
        ++answered;
        if (*d.correct) ++correct_answered;
    }
    return from_counts(answered, correct_answered,
                       static_cast<long long>(decisions.size()));
}

Curve sweep(const std::vector<double>& sigma, const std::vector<bool>& correct,
            const std::vector<double>& taus) {
    if (sigma.size() != correct.size())
        throw domain_error("sigma and correct differ in length");
    if (sigma.empty()) throw domain_error("sweep needs at least one question");
    check_taus(taus);

    Curve curve;
    curve.reserve(taus.size());
    for (double tau : taus) {
        long long answered = 0;
        long long correct_answered = 0;
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            if (sigma[i] > tau) {
                ++answered;
                if (correct[i]) ++correct_answered;
            }
        }
        CurvePoint p;
        p.tau = tau;
        p.metrics = from_counts(answered, correct_answered,
                                static_cast<long long>(sigma.size()));
        curve.push_back(std::move(p));
    }
    return curve;
}

Curve joint_sweep(const std::vector<double>& f_scores,
                  const std::vector<double>& sigma,
                  const std::vector<bool>& correct,
                  const std::vector<double>& taus) {
    if (f_scores.size() != sigma.size() || sigma.size() != correct.size())
        throw domain_error("f_scores, sigma and correct differ in length");
    if (sigma.empty()) throw domain_error("sweep needs at least one question");
    check_taus(taus);

    Curve curve;
    curve.reserve(taus.size());
    for (double tau : taus) {
        long long answered = 0;
        long long correct_answered = 0;
        long long blocked = 0;
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            if (f_scores[i] <= tau) ++blocked;
            if (f_scores[i] > tau && sigma[i] > tau) {
                ++answered;
                if (correct[i]) ++correct_answered;
            }
        }
        CurvePoint p;
        p.tau = tau;
        p.metrics = from_counts(answered, correct_answered,
                                static_cast<long long>(sigma.size()));
        p.filtered_fraction = static_cast<double>(blocked) /
                              static_cast<double>(sigma.size());
        curve.push_back(std::move(p));
    }
    return curve;
}

FilterReport compare(const std::vector<Decision>& base_decisions,
                     const std::vector<double>& f_scores, double tau1,
                     double tau2) {
    if (base_decisions.size() != f_scores.size())
        throw domain_error("decisions and f_scores differ in length");
    if (!(tau2 >= 0.0 && tau2 <= 1.0)) throw domain_error("tau2 out of [0,1]");

    std::vector<Decision> filtered = base_decisions;
    long long blocked = 0;
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        if (f_scores[i] <= tau2) {
            ++blocked;
            filtered[i].answered = false;
        }
    }

    FilterReport r;
    r.tau1 = tau1;
    r.tau2_star = tau2;
    r.base = evaluate(base_decisions);
    r.filtered = evaluate(filtered);
    r.pct_filter = 100.0 * static_cast<double>(blocked) /
                   static_cast<double>(base_decisions.size());
    if (r.base.precision && r.filtered.precision)
        r.delta_pr = *r.filtered.precision - *r.base.precision;
    r.delta_re = r.filtered.recall - r.base.recall;
    r.delta_f1 = r.filtered.f1 - r.base.f1;
    return r;
}

std::vector<double> uniform_grid(long long n) {
    if (n < 2) throw domain_error("grid needs at least 2 points");
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        taus.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
    return taus;
}

void write_curve_csv(const Curve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + path);

    out << "tau,precision,recall,f1,filtered_fraction\n";
    char buf[32];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << buf;
    };
    for (const CurvePoint& p : curve) {
        cell(p.tau);
        out << ',';
        if (p.metrics.precision) cell(*p.metrics.precision);
        out << ',';
        cell(p.metrics.recall);
        out << ',';
        cell(p.metrics.f1);
        out << ',';
        if (p.filtered_fraction) cell(*p.filtered_fraction);
        out << '\n';
    }
    if (!out) throw io_error("failed writing curve CSV: " + path);
}

}  // namespace qfilter
