#include "terrastep/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace terrastep {

std::string_view action_name(FootAction a) {
    return a == FootAction::Deploy ? "DEPLOY" : "RETRACT";
}

bool is_destabilizing(TerrainClass t) {
    switch (t) {
        case TerrainClass::Poppy:
        case TerrainClass::Gravel:
        case TerrainClass::Straw:
        case TerrainClass::Grass:  // artificial turf shifts underfoot
        case TerrainClass::Foam:
        case TerrainClass::Carpet:
            return true;
        case TerrainClass::Metal:
        case TerrainClass::Wood:
        case TerrainClass::Mat:
        case TerrainClass::Concrete:
            return false;
    }
    throw std::invalid_argument("is_destabilizing: bad terrain code");
}

ActuationCommand decide(TerrainClass label) {
    return {is_destabilizing(label) ? FootAction::Deploy : FootAction::Retract, label};
}

FootState apply(const FootState& state, const ActuationCommand& cmd) {
    FootState next = state;
    if (cmd.action == FootAction::Deploy) {
        next.tarsal_angle_deg = kDeployedAngleDeg;
        next.servo_angle_deg = 180.0;  // wound position
        next.deployed = true;
        next.contact_area_factor = kDeployedAreaFactor;
    } else {
        next.tarsal_angle_deg = kPassiveAngleDeg;
        next.servo_angle_deg = 0.0;
        next.deployed = false;
        next.contact_area_factor = 1.0;
    }
    return next;
}

double stabilizing_force_n(double servo_torque_kgcm) {
    if (!(servo_torque_kgcm >= 0.0 && servo_torque_kgcm <= kMaxServoTorqueKgCm))
        throw std::invalid_argument("stabilizing_force_n: torque outside [0, 22.8] kg-cm");
    return servo_torque_kgcm * (kMaxStabilizingForceN / kMaxServoTorqueKgCm);
}

std::pair<double, double> force_split(double total_n, double roll_deg) {
    if (total_n < 0.0) throw std::invalid_argument("force_split: negative total force");
    const double shift = std::clamp(roll_deg / kFullTransferRollDeg, -1.0, 1.0);
    const double left = total_n * (1.0 - shift) / 2.0;
    return {left, total_n - left};  // exact conservation
}

}  // namespace terrastep
