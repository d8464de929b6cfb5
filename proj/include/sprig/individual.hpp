#pragma once

#include "program.hpp"

namespace sprig {

// A program plus its objective vector and the per-row errors driving
// lexicase selection. Programs whose training predictions go non-finite
// are flagged worst: every error slot holds kWorstLoss.
struct Individual {
    Program program;
    double loss = kWorstLoss;            // mean squared error / mean log-loss
    long long complexity = 0;
    double validation_loss = kWorstLoss;
    int rank = -1;
    double crowding = 0.0;
    std::vector<double> case_errors;

    bool flagged_worst() const { return loss == kWorstLoss; }
};

} // namespace sprig
