#include <CLI11.hpp>

#include <iostream>

#include "vinv/commands.hpp"

using namespace vinv;

namespace {

// Enum flags are parsed as text and mapped once parsing succeeds.
struct EnumFlags {
    std::string connectivity = "8";
    std::string span_method = "largest-gap";
    std::string filter_mode = "voxel";

    void apply(AssessConfig& cfg) const {
        cfg.involvement.connectivity = connectivity == "4" ? Connectivity::Four : Connectivity::Eight;
        cfg.involvement.span_method = span_method == "minmax" ? SpanMethod::MinMax : SpanMethod::LargestGap;
        cfg.filter_mode = filter_mode == "component" ? FilterMode::Component : FilterMode::Voxel;
    }
};

void add_involvement_flags(CLI::App* cmd, AssessConfig& cfg, EnumFlags& flags) {
    cmd->add_option("--connectivity", flags.connectivity, "In-slice connectivity")
        ->check(CLI::IsMember({"4", "8"}))
        ->capture_default_str();
    cmd->add_option("--span-method", flags.span_method, "Angular span method")
        ->check(CLI::IsMember({"largest-gap", "minmax"}))
        ->capture_default_str();
    cmd->add_option("--threshold", cfg.threshold, "Probability threshold for masks")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--filter-mode", flags.filter_mode, "Critical-vessel filter")
        ->check(CLI::IsMember({"voxel", "component"}))
        ->capture_default_str();
    cmd->add_flag("--critical", cfg.critical, "Restrict to vessels outside the pancreas");
    cmd->add_option("--ks", cfg.ks, "Sigma steps for the uncertainty sweep")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tumor-vessel involvement assessment for 3D segmentation volumes", "vinv"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    AssessArgs assess;
    auto* a = app.add_subcommand("assess", "Involvement and resectability for one scan");
    a->add_option("input", assess.input, "Volume header (.json)")->required();
    a->add_option("--folds", assess.folds, "Fold volumes or sample directories for a sweep");
    a->add_option("--id", assess.scan_id, "Scan id (defaults to the input stem)");
    a->add_option("-o,--out", assess.out, "Output file (default stdout)");
    a->add_option("--overlay", assess.overlay_dir, "Directory for contact overlays");
    EnumFlags a_flags;
    add_involvement_flags(a, assess.config, a_flags);

    EvaluateArgs evaluate;
    auto* e = app.add_subcommand("evaluate", "Metric suite over a manifest");
    e->add_option("manifest", evaluate.manifest, "JSON-lines manifest")->required()->check(CLI::ExistingFile);
    e->add_option("-o,--out", evaluate.out, "Report file (default stdout)");
    e->add_option("--table", evaluate.table, "Text table file");
    EnumFlags e_flags;
    add_involvement_flags(e, evaluate.config, e_flags);

    UncertaintyArgs unc;
    auto* u = app.add_subcommand("uncertainty", "Ensemble mean/std and sigma sweep");
    u->add_option("inputs", unc.inputs, "Fold volumes or sample directories")->required();
    u->add_option("--out-dir", unc.out_dir, "Output directory")->required();
    u->add_option("--id", unc.scan_id, "Scan id")->capture_default_str();
    u->add_option("--overlay", unc.overlay_dir, "Directory for std heat maps");
    u->add_flag("--sweep,!--no-sweep", unc.sweep, "Run the sigma sweep");
    EnumFlags u_flags;
    add_involvement_flags(u, unc.config, u_flags);

    LossArgs loss;
    auto* l = app.add_subcommand("loss", "Loss values for a prediction against GT");
    l->add_option("pred", loss.pred, "Probability volume")->required();
    l->add_option("gt", loss.gt, "Mask or layered-label volume")->required();
    l->add_option("--beta", loss.weights.beta, "BCE weight within the main term")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    l->add_option("--alpha", loss.weights.alpha_w, "Main-term weight against the overlap term")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    l->add_flag("--gradcheck", loss.gradcheck, "Report max relative gradient error");
    l->add_option("--gradcheck-entries", loss.gradcheck_entries, "Entries probed per loss (0 = all)")
        ->capture_default_str();
    l->add_option("-o,--out", loss.out, "Output file (default stdout)");

    PhantomArgs ph;
    std::string phantom_kind, vessel = "vein";
    auto* p = app.add_subcommand("phantom", "Synthetic scenes with analytic truth");
    p->add_option("kind", phantom_kind, "wrap, suite or uncertainty")
        ->required()
        ->check(CLI::IsMember({"wrap", "suite", "uncertainty"}));
    p->add_option("--out-dir", ph.out_dir, "Output directory")->required();
    p->add_option("--vessel", vessel)->check(CLI::IsMember({"artery", "vein"}))->capture_default_str();
    p->add_option("--radius", ph.spec.radius)->capture_default_str();
    p->add_option("--span", ph.spec.span_deg)->capture_default_str();
    p->add_option("--wrap-center", ph.spec.wrap_center_deg)->capture_default_str();
    p->add_option("--thickness", ph.spec.thickness)->capture_default_str();
    p->add_option("--band", ph.spec.band_deg, "Uncertain band per side, degrees")->capture_default_str();
    p->add_option("--seed", ph.seed)->capture_default_str();
    p->add_option("--count", ph.count, "Suite size")->capture_default_str();
    p->add_flag("--layered", ph.layered, "Write the wrap scene as layered labels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitInputError;
    }

    a_flags.apply(assess.config);
    e_flags.apply(evaluate.config);
    u_flags.apply(unc.config);
    if (a->parsed()) return cmd_assess(assess, std::cout, std::cerr);
    if (e->parsed()) return cmd_evaluate(evaluate, std::cout, std::cerr);
    if (u->parsed()) return cmd_uncertainty(unc, std::cout, std::cerr);
    if (l->parsed()) return cmd_loss(loss, std::cout, std::cerr);
    if (p->parsed()) {
        ph.kind = phantom_kind == "suite"         ? PhantomKind::Suite
                  : phantom_kind == "uncertainty" ? PhantomKind::Uncertainty
                                                  : PhantomKind::Wrap;
        ph.spec.vessel = vessel == "artery" ? VesselKind::Artery : VesselKind::Vein;
        if (ph.kind == PhantomKind::Uncertainty && ph.spec.band_deg == 0.0) ph.spec.band_deg = 30.0;
        return cmd_phantom(ph, std::cout, std::cerr);
    }
    return kExitInputError;
}
