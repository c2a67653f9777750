// Minimal end-to-end walk: synthesize a dataset, train one chaotic WNN
// generator, run both attacks against a decision tree and print the AUC drop.

#include <iostream>

#include "tabadv/tabadv.hpp"

int main() {
    using namespace tabadv;

    const std::string csv = "quickstart_data.csv";
    cli::make_synthetic(cli::SyntheticKind::SeparableGaussians, 1000, 8, 7, csv);

    cli::ExperimentConfig cfg;
    cfg.dataset_path = csv;
    cfg.victim = cli::VictimKind::Dt;
    cfg.generator = vae::GeneratorVariant::CvaeWnn;
    cfg.wavelet = net::WaveletKind::Morlet;
    cfg.optimizer = net::OptimizerKind::Adagrad;
    cfg.lr = 0.001;
    cfg.epochs = 200;
    cfg.latent_dim = 8;

    for (auto attack : {cli::AttackKind::Evasion, cli::AttackKind::Poison}) {
        cfg.attack = attack;
        const auto report = attacks::run_attack(cfg);
        std::cout << cli::to_string(attack) << ": auc " << report.auc_before << " -> "
                  << report.auc_after << " (delta " << report.delta << ")\n";
    }
    return 0;
}
