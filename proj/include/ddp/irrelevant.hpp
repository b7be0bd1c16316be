#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/instance.hpp"
#include "ddp/solver.hpp"
#include "ddp/triples.hpp"

namespace ddp {

// ---------------------------------------------------------------------------
// Occupancy lists

/// List(v): indices of the paths using v. Only vertices of the triple are
/// filled when a triple is given.
struct Occupancy {
  int c = 1;
  std::vector<std::vector<int>> lists;

  /// i is in List(v), or List(v) has room for one more path.
  bool i_free(int v, int i) const;
  /// Groups V(L) for every list L that occurs, keyed by the sorted list.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> groups() const;
};

Occupancy compute_occupancy(const Instance& inst, const RoutedSolution& sol, const KTriple* triple = nullptr);
/// (u, Mat(u)) with u in C and both ends i-free, lowest C index first.
std::optional<std::pair<int, int>> find_free_pair(const KTriple& t, const Occupancy& occ, int i);
/// A path index present in both lists. Both lists must be full and 2c > k,
/// which forces a common index; InvalidArgument otherwise.
int common_path(const Occupancy& occ, int u, int v, int k);

// ---------------------------------------------------------------------------
// Thresholds

struct Thresholds {
  long long f = 0, d1 = 0, m1 = 0, d2 = 0, m2 = 0, x = 0;
  int h = 0;

  /// d2 = 8k(4k+1)+8k+c, m2 = 8k+c, x = 2 d2 m2, d1 = 7k(4k+1)+8k+x,
  /// m1 = 8k+x, f = 3(4 C(k,c) + 2k(8c+4) + x).
  static Thresholds defaults(int k, int c, int h = 0);
  /// Small hand-picked values for desk-scale runs; soundness then rests on
  /// the oracle re-check, not on the thresholds.
  static Thresholds desk(long long f, long long x = 1, long long m1 = 1, long long d1 = 1, long long m2 = 1,
                         long long d2 = 1);
};

// ---------------------------------------------------------------------------
// Bound audits

struct AuditWitness {
  std::string bound;  ///< "lemma4", "lemma5", "lemma6a", "lemma6c" or "corollary1"
  int path = -1;
  RoutedSolution improved;  ///< solution after the shortcut of the proof
  bool confirmed = false;   ///< improved verifies, is shorter, and find_shortcut agrees
  std::string note;
};

struct LemmaReport {
  int max_b_per_path = 0;
  int max_a_per_path = 0;
  int max_c_per_path = 0;
  int max_b_per_full_list = 0;  ///< largest |V(L) cap B| over lists with |L| = c
  bool lemma6_applies = false;  ///< some b in B has |List(b)| <= c - 1
  std::vector<std::string> violations;
  std::vector<AuditWitness> witnesses;
  bool ok() const { return violations.empty(); }
};

/// Checks the four bounds on sol. PreconditionFailed when 2c <= k, or when
/// require_minimal is set and sol has a shortcut. InvalidSolution when sol
/// does not verify.
LemmaReport audit_lemma_bounds(const Instance& inst, const KTriple& t, const RoutedSolution& sol,
                               bool require_minimal = true);

// ---------------------------------------------------------------------------
// Rerouting rounds

/// Copy of inst without arcs from C to B and from B to A.
Instance masked_instance(const Instance& inst, const KTriple& t);

struct RerouteEdit {
  int path = -1;
  std::string rule;  ///< "R", "S", "R'", "S'" or "final"
  std::vector<int> before, after;
  /// Y0 or Y' for the S rules, distinguished arc first.
  std::vector<std::pair<int, int>> matching;
};

struct ReroutePlan {
  std::vector<int> X;
  std::string round1_branch;  ///< "empty" (X = B_empty) or "gamma"
  std::vector<std::pair<int, int>> gamma;
  int special = -1;
  std::string round2_branch;  ///< "empty" (S'_b is empty) or "gamma"
  std::vector<std::pair<int, int>> gamma_prime;
  std::vector<RerouteEdit> edits;
  RoutedSolution Q, Q_prime, final_solution;
};

/// Structural part of round one: X and the auxiliary digraph Gamma.
/// TripleTooSmall when fewer than th.x vertices qualify.
void select_x(const Instance& masked, const KTriple& t, const Thresholds& th, ReroutePlan& plan);
/// Structural part of round two: the special vertex of X.
void select_special(const Instance& masked, const KTriple& t, const Thresholds& th, ReroutePlan& plan);

/// Reroutes every entry into X from outside A. sol must be a minimal
/// solution of masked_instance(inst, t). Fills X, gamma, Q and edits.
ReroutePlan reroute_round1(const Instance& inst, const KTriple& t, const RoutedSolution& sol, const Thresholds& th);
/// Reroutes every exit from the special vertex to outside C. Fills special,
/// gamma_prime, Q_prime and appends edits.
void reroute_round2(const Instance& inst, const KTriple& t, ReroutePlan& plan, const Thresholds& th);
/// Moves every path through the special vertex to an unused vertex of B.
/// The result avoids the special vertex and verifies on inst.
void reroute_final(const Instance& inst, const KTriple& t, ReroutePlan& plan);

// ---------------------------------------------------------------------------
// Pipeline

struct IrrelevantOptions {
  bool oracle = true;            ///< re-check with is_relevant under the cap
  int oracle_cap = 18;           ///< vertices
  double oracle_time_limit_s = 60.0;
  bool certificate = true;       ///< also run the three rounds on a minimal solution
};

struct IrrelevantResult {
  int vertex = -1;
  KTriple triple;  ///< after dropping terminals
  std::vector<int> X;
  std::string round1_branch, round2_branch;
  bool oracle_checked = false;
  bool oracle_irrelevant = false;
  bool certified = false;  ///< the rounds produced a solution avoiding vertex
  std::string certificate_note;
  std::vector<std::string> trace;
};

/// The special vertex of the triple. PreconditionFailed when 2c <= k,
/// InvalidArgument when t does not validate, TripleTooSmall when the triple
/// minus terminals is smaller than th.x or no X qualifies.
IrrelevantResult find_irrelevant_vertex(const Instance& inst, const KTriple& t, const Thresholds& th,
                                        const IrrelevantOptions& opt = {});

struct WinwinOptions {
  IrrelevantOptions irrelevant;
  int jobs = 1;
  int max_iterations = 1000;
};

struct WinwinResult {
  std::optional<RoutedSolution> solution;  ///< in the input's vertex numbering
  std::vector<int> deleted;                ///< input vertex indices, in deletion order
  int final_width = -1;
  bool rejected_candidate = false;  ///< the oracle refused a proposed deletion
  std::vector<std::string> trace;
};

/// Deletes special vertices of th.f-triples while the oracle agrees, then
/// solves exactly over an optimal decomposition. PreconditionFailed when
/// 2c <= k, InvalidArgument for non-semicomplete or restricted input,
/// CapExceeded when the remaining digraph is above the decomposition cap.
WinwinResult winwin_solve(const Instance& inst, const Thresholds& th, const WinwinOptions& opt = {});

}  // namespace ddp
