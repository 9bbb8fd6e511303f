#include <CLI11.hpp>
#include <iostream>

#include "qhsub/cli.hpp"
#include "qhsub/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qhsub: subellipticity certificates for quasihomogeneous complex vector-field systems"};
    app.require_subcommand(1);

    std::string config_path, builtin, direction, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--builtin", builtin, "built-in symbol name (see `examples list`)");
        cmd->add_option("--direction", direction, "microlocal direction: pos|neg|both");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "RNG seed recorded in every output")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* check = app.add_subcommand("check", "validate the profile assumptions and report a verdict");
    CLI::App* certify = app.add_subcommand("certify", "construct escape curves and verify the criterion constants");
    CLI::App* estimate = app.add_subcommand("estimate", "sweep the kernel norm and fit the decay exponent");
    CLI::App* examples = app.add_subcommand("examples", "built-in symbol catalogue");
    CLI::App* examples_list = examples->add_subcommand("list", "list built-in symbols");
    add_common(check);
    add_common(certify);
    add_common(estimate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (examples_list->parsed()) return qhsub::cmd_examples_list();
        auto opt = [](const std::string& s) {
            return s.empty() ? std::optional<std::string>{} : std::optional<std::string>{s};
        };
        const qhsub::RunConfig config =
            qhsub::load_config(opt(config_path), opt(builtin), opt(direction), opt(out_dir),
                               seed_set ? std::optional<std::uint64_t>{seed} : std::nullopt);
        if (check->parsed()) return qhsub::cmd_check(config);
        if (certify->parsed()) return qhsub::cmd_certify(config);
        if (estimate->parsed()) return qhsub::cmd_estimate(config);
    } catch (const qhsub::MalformedInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const qhsub::ConstraintViolation& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return 1;
    } catch (const qhsub::WeightViolation& e) {
        std::cerr << "weight violation: " << e.what() << "\n";
        return 1;
    } catch (const qhsub::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
