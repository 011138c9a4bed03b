#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vinv/loss.hpp"
#include "vinv/phantom.hpp"
#include "vinv/report.hpp"

namespace vinv {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitChannelError = 3;
inline constexpr int kExitPartialFailure = 4;

struct AssessArgs {
    std::filesystem::path input;
    std::vector<std::filesystem::path> folds;  // optional sweep inputs
    std::string scan_id;                       // defaults to the input stem
    AssessConfig config;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> overlay_dir;
};

struct EvaluateArgs {
    std::filesystem::path manifest;
    AssessConfig config;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> table;
};

struct UncertaintyArgs {
    std::vector<std::filesystem::path> inputs;  // fold volumes or sample directories
    std::string scan_id = "ensemble";
    AssessConfig config;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> overlay_dir;
    bool sweep = true;
};

struct LossArgs {
    std::filesystem::path pred;
    std::filesystem::path gt;
    LossWeights weights;
    bool gradcheck = false;
    std::size_t gradcheck_entries = 256;
    std::optional<std::filesystem::path> out;
};

enum class PhantomKind { Wrap, Suite, Uncertainty };

struct PhantomArgs {
    PhantomKind kind = PhantomKind::Wrap;
    PhantomSpec spec;
    std::uint64_t seed = 0;
    std::size_t count = 20;
    bool layered = false;
    std::filesystem::path out_dir;
};

int cmd_assess(const AssessArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_uncertainty(const UncertaintyArgs& args, std::ostream& out, std::ostream& err);
int cmd_loss(const LossArgs& args, std::ostream& out, std::ostream& err);
int cmd_phantom(const PhantomArgs& args, std::ostream& out, std::ostream& err);

/// Mask input from any volume kind: layered labels are decoded and
/// probabilities thresholded.
MaskVolume load_masks(const std::filesystem::path& header, double threshold);

/// A directory of sample volumes becomes one sample set; a file is a
/// deterministic fold.
FoldSet load_folds(const std::vector<std::filesystem::path>& inputs);

/// Writes `text` to `path` through a temporary sibling and a rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace vinv
