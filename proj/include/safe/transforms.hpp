#pragma once

#include <string>
#include <vector>

#include "safe/accumulator.hpp"
#include "safe/inputs.hpp"
#include "safe/linalg.hpp"

namespace safe {

enum class EffectSizeKind { Reciprocal, LnRoM, Smd, LnOR, LnRR, LnCVR, Hwd };

const char* kind_name(EffectSizeKind kind);
EffectSizeKind kind_from_string(const std::string& name);

// Continuity-correction policy. The scope is fixed per kind (lnOR: all four
// cells, lnRR: zero successes only, HWD: all three categories); only the added
// constant is configurable.
struct CcPolicy {
    double add = 0.5;

    // add values other than 0.5 and 1.0 are accepted with a warning.
    static CcPolicy with_add(double add, std::vector<std::string>* warnings = nullptr);
};

// One transformed replicate: the effect-size value, or a rejection.
struct TransformOutcome {
    double value = 0.0;
    bool valid = false;
    bool cc_applied = false;
};

// The bootstrap cloud summary: counts plus streaming moments over the valid
// values; the values themselves are retained only when the caller asks.
struct ReplicateBatch {
    std::uint64_t drawn = 0;
    std::uint64_t valid = 0;
    std::uint64_t rejected_nonpositive = 0;
    std::uint64_t cc_applied = 0;
    MomentAccumulator moments;
    std::vector<double> values;  // empty unless retention was requested
    std::vector<std::string> warnings;
};

// --- per-replicate transforms (shared by the matrix path and the engine) ---
// The log-based kinds are evaluated as differences of per-group log terms so
// that swapping the groups negates the value bit-exactly.

TransformOutcome reciprocal_replicate(double xbar);
TransformOutcome lnrom_replicate(double x1, double x2);
TransformOutcome smd_replicate(double x1, double x2, double v1, double v2,
                               long long n1, long long n2);
TransformOutcome lnor_replicate(double a, double b, double c, double d, double add);
TransformOutcome lnrr_replicate(double a, double n1, double c, double n2, double add);
TransformOutcome lncvr_replicate(double x1, double x2, double v1, double v2);
TransformOutcome hwd_replicate(double n_aa, double n_het, double n_minor,
                               double n, double add);

// --- plug-in estimates (observed-level; CC only where a zero makes the
// formula undefined) -------------------------------------------------------

double plugin_reciprocal(const GroupSummary& g);
double plugin_lnrom(const GroupSummary& g1, const GroupSummary& g2);
double plugin_smd(const GroupSummary& g1, const GroupSummary& g2);
double plugin_lnor(const ContingencyTable& t, const CcPolicy& cc);
double plugin_lnrr(const ContingencyTable& t, const CcPolicy& cc);
double plugin_lncvr(const GroupSummary& g1, const GroupSummary& g2);
double plugin_hwd(const GenotypeCounts& g, const CcPolicy& cc);

// Dispatching wrapper over the per-kind functions above.
double plugin_estimate(EffectSizeKind kind, const EffectInputs& inputs,
                       const CcPolicy& cc);

// Vectorised transform step over a matrix of model draws (one row per
// replicate, columns in the model's coordinate order). `inputs` supplies the
// observed design quantities some transforms need (group sizes, totals).
// Retains every accepted value. Throws ExcessRejectionError when fewer than
// half the rows survive; attaches a warning when fewer than 99% do.
ReplicateBatch transform_replicates(EffectSizeKind kind, const Matrix& draws,
                                    const CcPolicy& cc, const EffectInputs& inputs);

}  // namespace safe
