// scmkit: semantic change modeling over precomputed embedding tables.
//
//   scmkit predict   --dataset d.tsv --emb-a a.emb --emb-b b.emb --method outlier2cluster ...
//   scmkit train-nsd --dataset dev.tsv --emb-a a.emb --emb-b b.emb --out nsd.model
//   scmkit evaluate  --dataset gold.tsv --predictions pred.tsv --out report.tsv
//   scmkit ablate    --dataset dev.tsv --emb-a a.emb --emb-b b.emb --out ablation.tsv [--pr-dir curves/]
//   scmkit positions --dataset d.tsv --forms forms.tsv --out d_spans.tsv
//   scmkit synth     --out-dir dir/ [--words 50 --seed 1]
//
// Every subcommand but synth accepts --config <file> with key=value lines (keys are long flag
// names without dashes); flags given on the command line win. SCMKIT_JOBS sets the
// default for --jobs.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "scmkit/commands.hpp"
#include "scmkit/synthetic.hpp"

namespace
{

using namespace scmkit;
using commands::RunConfig;

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool has_flag(const std::vector<std::string> &args, const std::string &flag)
{
    return std::any_of(args.begin(), args.end(), [&](const std::string &a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

// Replaces `--config <file>` by the file's key=value pairs as flags, skipping flags that
// are already present, then adds --jobs from SCMKIT_JOBS if still unset.
std::vector<std::string> expand_defaults(std::vector<std::string> args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t drop = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            drop = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            drop = 1;
        } else {
            continue;
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + drop));
        std::ifstream in(path);
        if (!in) {
            throw scmkit::Error("cannot open config file " + path);
        }
        std::vector<std::string> extra;
        std::string line;
        for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
            const auto t = trim(line);
            if (t.empty() || t[0] == '#') {
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) {
                throw scmkit::Error(path + ": line " + std::to_string(lineno) + ": expected key=value");
            }
            const auto flag = "--" + std::string(trim(t.substr(0, eq)));
            if (!has_flag(args, flag)) {
                extra.push_back(flag);
                extra.emplace_back(trim(t.substr(eq + 1)));
            }
        }
        args.insert(args.end(), extra.begin(), extra.end());
        break;
    }
    if (const char *jobs = std::getenv("SCMKIT_JOBS"); jobs && !has_flag(args, "--jobs")) {
        args.emplace_back("--jobs");
        args.emplace_back(jobs);
    }
    return args;
}

void add_common(CLI::App *sub, RunConfig &cfg)
{
    sub->add_option("--config", "key=value file with default flag values");
    sub->add_option("--dataset", cfg.dataset, "dataset TSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "output file")->required();
    sub->add_option("--jobs", cfg.jobs, "worker threads (default: $SCMKIT_JOBS or 1)")->check(CLI::PositiveNumber);
}

void add_spaces(CLI::App *sub, RunConfig &cfg)
{
    static const std::map<std::string, Space> spaces{{"a", Space::a}, {"b", Space::b}};
    sub->add_option("--emb-a", cfg.emb_a, "embeddings of the fine-tuned encoder")->check(CLI::ExistingFile);
    sub->add_option("--emb-b", cfg.emb_b, "embeddings of the base encoder")->check(CLI::ExistingFile);
    sub->add_option("--wsd-space", cfg.routing.wsd, "space used for WSD (a|b)")
        ->transform(CLI::CheckedTransformer(spaces));
    sub->add_option("--wsi-space", cfg.routing.wsi, "space used for WSI and agglom (a|b)")
        ->transform(CLI::CheckedTransformer(spaces));
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"scmkit: distribute new usages between old senses and novel sense clusters"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto *predict = app.add_subcommand("predict", "label new usages with one of the methods");
    add_common(predict, cfg);
    add_spaces(predict, cfg);
    const std::map<std::string, commands::Method> methods{{"wsd", commands::Method::wsd},
                                                          {"wsi", commands::Method::wsi},
                                                          {"agglom", commands::Method::agglom},
                                                          {"cluster2sense", commands::Method::cluster2sense},
                                                          {"outlier2cluster", commands::Method::outlier2cluster}};
    const std::map<std::string, RelabelMode> modes{{"with-wsi", RelabelMode::with_wsi},
                                                   {"without-wsi", RelabelMode::without_wsi}};
    predict->add_option("--method", cfg.method, "wsd|wsi|agglom|cluster2sense|outlier2cluster")
        ->required()
        ->transform(CLI::CheckedTransformer(methods));
    predict->add_option("--mode", cfg.mode, "outlier relabeling: with-wsi|without-wsi")
        ->transform(CLI::CheckedTransformer(modes));
    predict->add_option("--nsd-model", cfg.nsd_model, "NSD model file (outlier2cluster)")->check(CLI::ExistingFile);
    predict->add_option("--k-extra", cfg.k_extra, "novel clusters kept by agglom");
    predict->add_option("--threshold", cfg.threshold, "override the NSD model threshold")->check(CLI::Range(0.0, 1.0));

    auto *train = app.add_subcommand("train-nsd", "train the novel sense detector on a gold dataset");
    add_common(train, cfg);
    add_spaces(train, cfg);
    train->add_option("--threshold", cfg.threshold, "decision threshold stored in the model")
        ->check(CLI::Range(0.0, 1.0));

    auto *evaluate = app.add_subcommand("evaluate", "score predictions against gold labels");
    add_common(evaluate, cfg);
    evaluate->add_option("--predictions", cfg.predictions, "prediction TSV")->required()->check(CLI::ExistingFile);

    auto *ablate = app.add_subcommand("ablate", "average precision of NSD features and feature subsets");
    add_common(ablate, cfg);
    add_spaces(ablate, cfg);
    ablate->add_option("--pr-dir", cfg.pr_dir, "directory for precision-recall curve TSVs");

    auto *positions = app.add_subcommand("positions", "locate target words in usages without spans");
    add_common(positions, cfg);
    positions->add_option("--forms", cfg.forms, "word-form list")->required()->check(CLI::ExistingFile);

    synthetic::Config synth_cfg;
    std::filesystem::path synth_dir;
    auto *synth = app.add_subcommand("synth", "write a synthetic dataset and two embedding spaces");
    synth->add_option("--out-dir", synth_dir, "output directory")->required();
    synth->add_option("--words", synth_cfg.n_words, "number of target words");
    synth->add_option("--seed", synth_cfg.seed, "random seed");
    synth->add_option("--dim", synth_cfg.dim, "embedding dimension");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (args.size() > 1 && args[0] != "synth") {
            args = expand_defaults(std::move(args));
        }
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "scmkit: " << e.what() << '\n';
        return EXIT_FAILURE;
    }

    try {
        if (*predict) {
            commands::cmd_predict(cfg);
        } else if (*train) {
            commands::cmd_train_nsd(cfg);
        } else if (*evaluate) {
            commands::cmd_evaluate(cfg);
        } else if (*ablate) {
            commands::cmd_ablate(cfg);
        } else if (*positions) {
            const auto s = commands::cmd_positions(cfg);
            std::cerr << "positions: filled " << s.filled << ", unmatched " << s.unmatched << '\n';
        } else if (*synth) {
            const auto data = synthetic::generate(synth_cfg);
            std::filesystem::create_directories(synth_dir);
            commands::write_file(synth_dir / "dataset.tsv", [&](std::ostream &o) { write_dataset(o, data.dataset); });
            commands::write_file(synth_dir / "a.emb", [&](std::ostream &o) { write_embeddings(o, data.space_a); });
            commands::write_file(synth_dir / "b.emb", [&](std::ostream &o) { write_embeddings(o, data.space_b); });
        }
    } catch (const std::exception &e) {
        std::cerr << "scmkit: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
