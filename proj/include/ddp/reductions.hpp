#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/digraph.hpp"
#include "ddp/instance.hpp"
#include "ddp/pathwidth.hpp"

namespace ddp {

// ---------------------------------------------------------------------------
// (3,1)-3-SAT sources

struct Literal {
  int var = 0;  ///< 0-based variable index
  bool positive = true;
  bool operator==(const Literal&) const = default;
};

/// Every variable occurs three times positively and once negatively, and no
/// clause mentions a variable twice; hence 3 * clauses = 4 * n_vars.
struct Sat31Instance {
  int n_vars = 0;
  std::vector<std::vector<Literal>> clauses;

  bool satisfied_by(const std::vector<bool>& assignment) const;
  /// Empty when the invariants hold, otherwise the first problem found.
  std::string check() const;
  bool operator==(const Sat31Instance&) const = default;
};

/// BadArity unless n_vars is a positive multiple of 3.
Sat31Instance random_sat31(int n_vars, std::uint64_t seed);
/// Lexicographically first satisfying assignment (false < true), if any.
/// CapExceeded above 20 variables.
std::optional<std::vector<bool>> sat_brute_force(const Sat31Instance& sat);
/// Number of satisfying assignments; CapExceeded above 20 variables.
std::uint64_t sat_count(const Sat31Instance& sat);

// ---------------------------------------------------------------------------
// Multicolored clique sources

/// Undirected graph on 0..N-1 with colour classes; edges inside a class are
/// not allowed.
struct MccInstance {
  std::vector<std::vector<int>> classes;
  std::vector<std::pair<int, int>> edges;

  int vertex_count() const;
  bool has_edge(int u, int v) const;
  /// Empty when valid; equal class sizes are checked by reduce_mcc.
  std::string check() const;
};

/// q classes of n vertices; each cross-class pair is an edge with
/// probability p, and a multicoloured clique is planted when `plant` is set.
/// The planted clique (one vertex per class) is written to `planted`.
MccInstance random_mcc(int q, int n, double p, std::uint64_t seed, bool plant = true,
                       std::vector<int>* planted = nullptr);
/// First multicoloured clique in class-index order, if any.
std::optional<std::vector<int>> mcc_brute_force(const MccInstance& mcc);

// ---------------------------------------------------------------------------
// Artifacts

enum class SourceKind { SatTournament, Restricted, Epsilon, C2, Mcc, MccCongested };
const char* source_name(SourceKind k);

/// A generated instance with the data its witness maps need.
struct ReductionArtifact {
  Instance instance;
  SourceKind kind = SourceKind::SatTournament;
  std::map<std::string, int> index;  ///< vertex label -> vertex
  std::optional<Sat31Instance> sat;
  std::optional<MccInstance> mcc;
  std::optional<DirectedPathDecomposition> decomposition;
  std::optional<CliquePartition> cliques;
  /// Vertex indices of the critical path, s* first, when the construction has one.
  std::vector<int> critical_path;
  int sat_requests = 0;  ///< number of one-shot requests inherited from the tournament reduction
  int mcc_n = 0;         ///< class size of the clique source

  /// InvalidArgument for unknown labels.
  int vertex(const std::string& label) const;
  const std::string& label(int v) const { return instance.names.at(v); }
};

/// Tournament with c = 1: one butterfly per variable, two vertices per clause.
ReductionArtifact reduce_sat_to_tournament(const Sat31Instance& sat);
/// Restricted instance with c = |K| / (d - 1) where K is the request set of the
/// tournament reduction, so that c = |K'| / d. BadRatio when d < 2 or the
/// division is not exact.
ReductionArtifact reduce_restricted(const Sat31Instance& sat, int d);
/// Restricted construction made unrestricted by adding c - 1 reverse requests
/// per one-shot request, with c the fixed point of c = ceil(((|X| + 1) c)^eps).
ReductionArtifact reduce_epsilon(const Sat31Instance& sat, double epsilon);
/// Congestion c used by reduce_epsilon for |X| one-shot requests.
int epsilon_congestion(int one_shot_requests, double epsilon);
/// Two-clique construction with a single clause source p*. With ratio_d set,
/// z = (2n + 2m - d m) / (d - 1) requests (s*, p*) are added and c = m + z.
ReductionArtifact reduce_c2(const Sat31Instance& sat, std::optional<int> ratio_d = std::nullopt);

/// Explicit routing for a satisfying assignment. NotSatisfying otherwise.
RoutedSolution sat_solution_from_assignment(const ReductionArtifact& art, const std::vector<bool>& assignment);
/// Reads pi(x_i) = 1 off the barred path of butterfly i using the barred
/// literal vertex. InvalidSolution when sol does not verify or the result
/// does not satisfy the formula.
std::vector<bool> sat_assignment_from_solution(const ReductionArtifact& art, const RoutedSolution& sol);

/// True when the left wing {xa, xb, xc} or the right wing {xd} of butterfly
/// `var` (0-based) is entirely used by paths of sol.
bool butterfly_has_busy_wing(const ReductionArtifact& art, const RoutedSolution& sol, int var);

/// Row-gadget construction; UnequalClasses when class sizes differ.
ReductionArtifact reduce_mcc(const MccInstance& mcc);
/// Adds z_s, z_t and c - 1 requests (z_s, z_t). InvalidArgument when c < 2
/// or art does not come from reduce_mcc.
ReductionArtifact mcc_congested_extension(const ReductionArtifact& art, int c);
/// The z_s -> z_t path of the extension as vertex indices.
std::vector<int> mcc_near_hamiltonian_path(const ReductionArtifact& art);
/// Explicit routing for a multicoloured clique (one vertex per class, in
/// class order). NotAClique otherwise.
RoutedSolution mcc_solution_from_clique(const ReductionArtifact& art, const std::vector<int>& clique);
/// Clique read off the unique gap of every row gadget. NotMinimal when some
/// path has a shortcut, NoGapFound when a gadget has no unique gap.
std::vector<int> mcc_clique_from_solution(const ReductionArtifact& art, const RoutedSolution& sol);

/// c copies of every vertex, each copy inheriting all arcs, copies of one
/// vertex forming a transitive tournament; output has c = 1. Terminal
/// occurrences are spread over the copies in request order.
/// RestrictedUnsupported for restricted instances.
Instance congestion_blowup(const Instance& inst);

}  // namespace ddp
