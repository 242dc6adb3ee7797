#pragma once

#include <utility>

#include "terrastep/types.hpp"

namespace terrastep {

inline constexpr double kDeployedAngleDeg = -15.0;  // below horizontal
inline constexpr double kPassiveAngleDeg = 10.0;    // spring-retracted
inline constexpr double kDeployedAreaFactor = 3.92; // +292% contact area
inline constexpr double kMaxServoTorqueKgCm = 22.8;
inline constexpr double kMaxStabilizingForceN = 447.0;
inline constexpr double kFullTransferRollDeg = 15.0;

enum class FootAction { Deploy, Retract };

std::string_view action_name(FootAction a);

struct ActuationCommand {
    FootAction action = FootAction::Retract;
    TerrainClass cause = TerrainClass::Metal;
};

struct FootState {
    double tarsal_angle_deg = kPassiveAngleDeg;
    double servo_angle_deg = 0.0;  // wound position, 0..360
    bool deployed = false;
    double contact_area_factor = 1.0;

    static FootState passive() { return {}; }
};

/// True for the terrains that destabilize the stance: POPPY, GRAVEL,
/// STRAW, GRASS, FOAM, CARPET.
bool is_destabilizing(TerrainClass t);

/// Bang-bang policy: DEPLOY on destabilizing terrain, RETRACT otherwise.
ActuationCommand decide(TerrainClass label);

/// Applies a command; idempotent, and the state space has exactly the
/// deployed and passive configurations.
FootState apply(const FootState& state, const ActuationCommand& cmd);

/// Linear linkage model anchored at (0 kg-cm, 0 N) and (22.8 kg-cm, 447 N).
/// Throws std::invalid_argument outside [0, 22.8].
double stabilizing_force_n(double servo_torque_kgcm);

/// Splits the stabilizing force between the left and right tarsal segments.
/// Even at zero roll, shifting linearly toward the falling side and
/// saturating at full transfer for |roll| >= 15 degrees. Positive roll
/// loads the right segment. left + right == total exactly.
std::pair<double, double> force_split(double total_n, double roll_deg);

}  // namespace terrastep
