// Criteria 1-4: gradient correctness, constructive-theorem oracles, and the
// WL/isomorphism cross-checks, each with its stated runtime budget.

#include <sstream>

#include "acc_util.hpp"
#include "siri/verification.hpp"

using namespace siri;

int main() {
    acc::Gate gate;

    {
        acc::Stopwatch sw;
        auto checks = run_gradient_checks(/*seed=*/20260810, /*trials=*/20, /*primitive_tol=*/1e-6,
                                          /*gnn_tol=*/1e-4);
        bool pass = true;
        std::ostringstream detail;
        for (const CheckResult& c : checks) {
            pass = pass && c.pass;
            if (!c.pass) detail << " " << c.name << " FAILED (" << c.detail << ")";
        }
        const double secs = sw.seconds();
        pass = pass && secs < 30.0;
        std::ostringstream msg;
        msg << "gradient checks, " << checks.size() << " suites incl. 6-layer GNN loss, rel err < 1e-4, " << secs
            << " s (< 30 s)" << detail.str();
        gate.report(1, pass, msg.str());
    }

    {
        acc::Stopwatch sw;
        auto checks = run_triangle_oracle_checks(/*seed=*/20260810);
        bool pass = true;
        for (const CheckResult& c : checks) pass = pass && c.pass;
        const double secs = sw.seconds();
        std::ostringstream msg;
        msg << "triangle network == brute force on all n<=6 graphs (exhaustive) and 50 BA graphs x 10 UID draws, "
            << secs << " s (< 60 s)";
        gate.report(2, pass && secs < 60.0, msg.str());
    }

    {
        acc::Stopwatch sw;
        auto checks = run_relabel_oracle_checks(/*seed=*/20260810);
        bool pass = true;
        for (const CheckResult& c : checks) pass = pass && c.pass;
        const double secs = sw.seconds();
        std::ostringstream msg;
        msg << "relabeling invariant over 200 re-draws x 20 graphs; layer-2 states vary across draws, " << secs
            << " s (< 30 s)";
        gate.report(3, pass && secs < 30.0, msg.str());
    }

    {
        acc::Stopwatch sw;
        auto checks = run_wl_iso_checks(/*seed=*/20260810);
        bool pass = true;
        for (const CheckResult& c : checks) pass = pass && c.pass;
        const double secs = sw.seconds();
        std::ostringstream msg;
        msg << "WL histograms equal on (C6, C3+C3) and (Shrikhande, rook); both non-isomorphic; 50 permuted pairs "
               "isomorphic, "
            << secs << " s (< 60 s)";
        gate.report(4, pass && secs < 60.0, msg.str());
    }

    return gate.exit_code();
}
