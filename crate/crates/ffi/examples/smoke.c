#include <stdio.h>
#include <stdlib.h>
#include "ns1d.h"

int main(void) {
    Ns1dParams params = {2.0, 1.0, 0.3, 2.0, 0.1};
    Ns1dGrid grid = {1.0, 64, 0};
    Ns1dControls controls = {0.01, 0.45, 0.25, 10000000, 50, 1e-12, 0};

    Ns1dScenario *sc = NULL;
    if (ns1d_scenario_smooth_periodic(params, grid, 1.0, 0.2, 1, 0.1, &sc) != NS1D_STATUS_OK) {
        fprintf(stderr, "scenario: %s\n", ns1d_last_error());
        return 1;
    }
    Ns1dTrajectory *traj = NULL;
    if (ns1d_simulate(sc, controls, 1, &traj) != NS1D_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", ns1d_last_error());
        return 1;
    }
    size_t n = ns1d_trajectory_snapshots(traj);
    double m0, m1;
    ns1d_trajectory_mass(traj, 0, &m0);
    ns1d_trajectory_mass(traj, n - 1, &m1);
    Ns1dEnergy e;
    ns1d_trajectory_energy(traj, n - 1, &e);
    printf("snapshots=%zu mass0=%.15g mass1=%.15g bd_total=%.15g\n", n, m0, m1, e.total);
    ns1d_trajectory_free(traj);
    ns1d_scenario_free(sc);
    return (m1 - m0 < 1e-12 && m0 - m1 < 1e-12) ? 0 : 1;
}
