#include "vanetsim/trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vanetsim {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double reward_delta(Severity s) {
    switch (s) {
        case Severity::low: return 0.05;
        case Severity::medium: return 0.08;
        case Severity::high: return 0.10;
    }
    return 0.0;
}

double punishment_delta(Severity s) {
    switch (s) {
        case Severity::low: return -0.15;
        case Severity::medium: return -0.30;
        case Severity::high: return -0.50;
    }
    return 0.0;
}

} // namespace

std::vector<std::string> validate(const SchemeConfig& cfg) {
    std::vector<std::string> errors;
    if (cfg.w_direct < 0 || cfg.w_indirect < 0 || cfg.w_rsu < 0) {
        errors.push_back("trust weights must be non-negative");
    }
    if (std::abs(cfg.w_direct + cfg.w_indirect + cfg.w_rsu - 1.0) > 1e-9) {
        errors.push_back("trust weights w_direct + w_indirect + w_rsu must sum to 1");
    }
    for (auto [name, v] : {std::pair<const char*, double>{"accept_threshold", cfg.accept_threshold},
                           {"announce_threshold", cfg.announce_threshold},
                           {"blacklist_floor", cfg.blacklist_floor},
                           {"initial_trust", cfg.initial_trust}}) {
        if (v < 0 || v > 1) {
            errors.push_back(std::string(name) + " must be in [0,1]");
        }
    }
    if (cfg.blacklist_floor >= cfg.announce_threshold) {
        errors.push_back("blacklist_floor must be below announce_threshold");
    }
    if (cfg.eval_timer <= 0) errors.push_back("eval_timer must be > 0");
    if (cfg.quorum < 1) errors.push_back("quorum must be >= 1");
    if (cfg.adjudication_timeout <= 0) errors.push_back("adjudication_timeout must be > 0");
    return errors;
}

TrustState& TrustTable::state(EntityId id) {
    auto it = table_.find(id);
    if (it == table_.end()) {
        TrustState fresh;
        fresh.score = initial_;
        it = table_.emplace(id, fresh).first;
    }
    return it->second;
}

double TrustTable::score(EntityId id) const {
    auto it = table_.find(id);
    return it == table_.end() ? initial_ : it->second.score;
}

bool TrustTable::blacklisted(EntityId id) const {
    auto it = table_.find(id);
    return it != table_.end() && it->second.blacklisted;
}

bool gate_announcement(const TrustState& sender, const SchemeConfig& cfg) {
    if (sender.blacklisted) return false;
    return sender.score >= cfg.announce_threshold;
}

std::optional<double> aggregate_trust(std::optional<double> direct,
                                      const std::vector<double>& indirect,
                                      std::optional<double> rsu,
                                      const SchemeConfig& cfg) {
    double num = 0.0;
    double den = 0.0;
    if (direct) {
        num += cfg.w_direct * *direct;
        den += cfg.w_direct;
    }
    if (!indirect.empty()) {
        double mean = 0.0;
        for (double v : indirect) mean += v;
        mean /= static_cast<double>(indirect.size());
        num += cfg.w_indirect * mean;
        den += cfg.w_indirect;
    }
    if (rsu) {
        num += cfg.w_rsu * *rsu;
        den += cfg.w_rsu;
    }
    if (den <= 0) {
        return std::nullopt;
    }
    return clamp01(num / den);
}

Observation sense_ground_truth(const EventRecord& e) {
    return e.ground_truth ? Observation::present : Observation::absent;
}

Verdict adjudicate(const EventRecord& e, EntityId subject,
                   const std::vector<Observation>& reports, int quorum, double now) {
    Verdict v;
    v.event = e;
    v.subject = subject;
    v.decided_at = now;
    if (static_cast<int>(reports.size()) < quorum) {
        v.outcome = VerdictOutcome::inconclusive;
        v.confidence = 0.0;
        return v;
    }
    int present = 0;
    int absent = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(quorum); ++i) {
        (reports[i] == Observation::present ? present : absent) += 1;
    }
    if (present == absent) {
        v.outcome = VerdictOutcome::inconclusive;
        v.confidence = 0.0;
        return v;
    }
    v.outcome = present > absent ? VerdictOutcome::confirmed : VerdictOutcome::refuted;
    v.confidence = static_cast<double>(std::max(present, absent)) / static_cast<double>(quorum);
    return v;
}

void apply_reward_punishment(TrustState& t, VerdictOutcome verdict, Severity severity,
                             double confidence, const SchemeConfig& cfg) {
    if (verdict == VerdictOutcome::inconclusive) {
        throw std::logic_error("apply_reward_punishment: inconclusive verdicts carry no delta");
    }
    double delta = 0.0;
    if (verdict == VerdictOutcome::confirmed) {
        delta = reward_delta(severity) * confidence;
    } else {
        // Punish harder the less history speaks for the entity.
        delta = punishment_delta(severity) * confidence * (1.5 - t.score);
        delta = std::clamp(delta, -0.5, 0.0);
    }
    t.score = clamp01(t.score + delta);
    if (t.score < cfg.blacklist_floor) {
        t.blacklisted = true;
    } else if (verdict == VerdictOutcome::confirmed) {
        t.blacklisted = false;
    }
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::none: return "none";
        case Scheme::receiver_side: return "receiver_side";
        case Scheme::sender_side: return "sender_side";
    }
    return "unknown";
}

std::string to_string(VerdictOutcome o) {
    switch (o) {
        case VerdictOutcome::confirmed: return "confirmed";
        case VerdictOutcome::refuted: return "refuted";
        case VerdictOutcome::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(const std::string& s) {
    if (s == "none") return Scheme::none;
    if (s == "receiver_side") return Scheme::receiver_side;
    if (s == "sender_side") return Scheme::sender_side;
    return std::nullopt;
}

} // namespace vanetsim
