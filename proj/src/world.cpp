#include "rcms/world.hpp"

#include <algorithm>
#include <cmath>

namespace rcms {

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * M_PI;
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

std::vector<AgentObservation> visible_agents(const VehicleState& ego,
                                             const std::vector<AgentObservation>& all,
                                             const FieldOfView& fov) {
    std::vector<AgentObservation> out;
    out.reserve(all.size());
    for (const auto& a : all) {
        if ((a.position - ego.position()).norm() <= fov.range) out.push_back(a);
    }
    std::sort(out.begin(), out.end(),
              [](const AgentObservation& a, const AgentObservation& b) { return a.id < b.id; });
    return out;
}

Vec2 to_road_frame(const Vec2& p, const RoadModel& road) {
    const Vec2 rel = p - road.origin;
    const double c = std::cos(road.road_heading);
    const double s = std::sin(road.road_heading);
    return {c * rel.x() + s * rel.y(), -s * rel.x() + c * rel.y()};
}

Vec2 from_road_frame(const Vec2& sd, const RoadModel& road) {
    const double c = std::cos(road.road_heading);
    const double s = std::sin(road.road_heading);
    return road.origin + Vec2(c * sd.x() - s * sd.y(), s * sd.x() + c * sd.y());
}

bool in_bounds(const Vec2& p, const RoadModel& road) {
    const double d = to_road_frame(p, road).y();
    return d >= road.corridor_min() && d <= road.corridor_max();
}

}  // namespace rcms
