// Criteria 5, 6 and 9: triangle-detection ordering with margins, invariance
// of the trained model, and the furthest-RNF non-degradation check. The
// trained models are shared across the three criteria.

#include <iostream>
#include <sstream>
#include <vector>

#include "acc_util.hpp"
#include "siri/experiments.hpp"

using namespace siri;

int main() {
    acc::Gate gate;
    acc::Stopwatch total;

    ExperimentManifest m = canned_manifest("triangle-interp");
    std::cout << "config: " << m.train_graphs << " train graphs (n=" << m.n << ", m=" << m.m_train << "), "
              << m.train.epochs << " epochs, " << m.num_seeds << " seeds, hidden " << m.model.hidden_dim << ", rnf "
              << m.model.rnf_dim << std::endl;
    TriangleData data = make_triangle_data(m);

    std::vector<ModeRun> runs;
    std::vector<const ModeRun*> siri_runs;
    for (TrainMode mode : {TrainMode::Constant, TrainMode::Rni, TrainMode::Siri})
        for (int s = 0; s < m.num_seeds; ++s) {
            acc::Stopwatch sw;
            runs.push_back(run_triangle_mode(data, m, mode, 1, s));
            std::cout << "  " << runs.back().mode << " seed " << s << ": interp " << runs.back().interp_acc
                      << ", extrap " << runs.back().extrap_acc << " (" << sw.seconds() << " s)" << std::endl;
        }
    for (const ModeRun& r : runs)
        if (r.mode == "siri") siri_runs.push_back(&r);

    // Criterion 5: ordering with margins at desk scale.
    {
        ModeSummary siri = summarize_mode(runs, "siri", 1);
        ModeSummary rni = summarize_mode(runs, "rni", 1);
        ModeSummary constant = summarize_mode(runs, "constant", 1);
        const double interp_margin_rni = 100.0 * (siri.interp_mean - rni.interp_mean);
        const double interp_margin_const = 100.0 * (siri.interp_mean - constant.interp_mean);
        const double extrap_margin_rni = 100.0 * (siri.extrap_mean - rni.extrap_mean);
        const bool pass = interp_margin_rni >= 5.0 && interp_margin_const >= 5.0 && extrap_margin_rni >= 10.0;
        std::ostringstream msg;
        msg << "siri interp " << 100 * siri.interp_mean << "% vs rni " << 100 * rni.interp_mean << "% / constant "
            << 100 * constant.interp_mean << "% (margins " << interp_margin_rni << " / " << interp_margin_const
            << " >= 5); siri extrap " << 100 * siri.extrap_mean << "% vs rni " << 100 * rni.extrap_mean << "% (margin "
            << extrap_margin_rni << " >= 10)";
        gate.report(5, pass, msg.str());
    }

    // Criterion 6: the trained SIRI models are UID-invariant in practice.
    {
        acc::Stopwatch sw;
        bool pass = true;
        std::ostringstream msg;
        msg << "T=" << m.invariance_T << ", " << m.invariance_graphs << "+" << m.invariance_graphs
            << " graphs per set; ratios:";
        for (const ModeRun* run : siri_runs) {
            InvarianceReport rep = triangle_invariance_report(*run, data, m);
            msg << " [seed " << run->seed_index << " train " << rep.train.mean << " test " << rep.test.mean << "]";
            pass = pass && rep.train.mean <= 0.05 && rep.test.mean <= 0.05;
        }
        msg << " all <= 0.05; " << sw.seconds() << " s";
        gate.report(6, pass, msg.str());
    }

    // Criterion 9: furthest-RNF selection (k=5) does not degrade.
    {
        for (int s = 0; s < m.num_seeds; ++s) {
            acc::Stopwatch sw;
            runs.push_back(run_triangle_mode(data, m, TrainMode::Siri, 5, s));
            std::cout << "  siri k=5 seed " << s << ": interp " << runs.back().interp_acc << ", extrap "
                      << runs.back().extrap_acc << " (" << sw.seconds() << " s)" << std::endl;
        }
        ModeSummary k1 = summarize_mode(runs, "siri", 1);
        ModeSummary k5 = summarize_mode(runs, "siri", 5);
        const double margin = 100.0 * (k5.interp_mean - k1.interp_mean);
        const bool pass = margin >= -1.0;
        std::ostringstream msg;
        msg << "siri k=5 interp " << 100 * k5.interp_mean << "% vs k=1 " << 100 * k1.interp_mean
            << "% (difference " << margin << " points >= -1)";
        gate.report(9, pass, msg.str());
    }

    std::cout << "total wall time " << total.seconds() << " s" << std::endl;
    return gate.exit_code();
}
