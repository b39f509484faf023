#pragma once

#include "vanetsim/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vanetsim {

enum class Scheme { none, receiver_side, sender_side };

/// Per-entity trust record. Scores stay clamped to [0,1]; the blacklist
/// flag is absorbing until a confirmed verdict lifts the score back above
/// the floor.
struct TrustState {
    double score = 0.5;
    bool blacklisted = false;
    std::map<EntityId, double> direct_evidence;
};

struct SchemeConfig {
    Scheme scheme = Scheme::none;
    double w_direct = 0.5;
    double w_indirect = 0.3;
    double w_rsu = 0.2;
    double accept_threshold = 0.5;
    double announce_threshold = 0.5;
    double blacklist_floor = 0.2;
    double eval_timer = 5.0;          // s, receiver-side decision delay
    int quorum = 3;                   // adjudication report quorum k
    double adjudication_timeout = 30.0; // s, measured from the first report
    double initial_trust = 0.5;
};

std::vector<std::string> validate(const SchemeConfig& cfg);

enum class VerdictOutcome { confirmed, refuted, inconclusive };

struct Verdict {
    EventRecord event;
    EntityId subject = -1; // the announcement's origin
    VerdictOutcome outcome = VerdictOutcome::inconclusive;
    double confidence = 0.0; // majority count / quorum, 0 when inconclusive
    double decided_at = 0.0;
};

/// Shared trust registry (the TA abstraction): both RSUs read and write
/// the same table. Entries default to the configured initial trust.
class TrustTable {
public:
    explicit TrustTable(double initial_trust = 0.5) : initial_(initial_trust) {}

    TrustState& state(EntityId id);
    double score(EntityId id) const;
    bool blacklisted(EntityId id) const;

private:
    double initial_;
    std::map<EntityId, TrustState> table_;
};

/// Sender-side announcement gating: allow iff not blacklisted and
/// score >= announce_threshold (inclusive). Other schemes always allow;
/// callers only consult this under sender_side.
bool gate_announcement(const TrustState& sender, const SchemeConfig& cfg);

/// Weighted mean of the present inputs, renormalized over the weights of
/// the inputs that are actually available. indirect contributes as the
/// mean of the collected recommendations (absent when empty). Returns
/// nothing when every input is absent (callers fall back to reject).
std::optional<double> aggregate_trust(std::optional<double> direct,
                                      const std::vector<double>& indirect,
                                      std::optional<double> rsu,
                                      const SchemeConfig& cfg);

/// Honest on-location sensing: reports the event's ground truth.
Observation sense_ground_truth(const EventRecord& e);

/// Majority decision over the collected observations. Fewer than `quorum`
/// reports yield inconclusive (quorum not met by timeout), as does an
/// exact tie. confidence = majority count / quorum otherwise.
Verdict adjudicate(const EventRecord& e, EntityId subject,
                   const std::vector<Observation>& reports, int quorum, double now);

/// Table-driven reward/punishment, replacing the fuzzy assessment with an
/// explicit delta schedule over (verdict, severity), scaled by the RSU's
/// confidence; punishments additionally scale with (1.5 - prior score) and
/// are clamped to [-0.5, 0]:
///   reward     +0.05 / +0.08 / +0.10   (low / medium / high)
///   punishment -0.15 / -0.30 / -0.50
/// The score is clamped to [0,1]. Dropping below blacklist_floor sets the
/// blacklist flag; a confirmed verdict that lifts the score back to the
/// floor clears it. Inconclusive verdicts are rejected (std::logic_error).
void apply_reward_punishment(TrustState& t, VerdictOutcome verdict, Severity severity,
                             double confidence, const SchemeConfig& cfg);

std::string to_string(Scheme s);
std::string to_string(VerdictOutcome o);
std::optional<Scheme> parse_scheme(const std::string& s);

} // namespace vanetsim
