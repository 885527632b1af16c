#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "occulstm/dataio.hpp"

namespace occulstm {

// First-order mass-balance room model. CO2 rises with occupant emission and
// decays toward ambient at the air-exchange rate; temperature relaxes toward
// an occupancy-dependent setpoint with the same first-order form; the
// remaining channels are baseline + occupancy bump + noise.
struct RoomParams {
  double ambient_co2 = 420.0;     // ppm
  double co2_per_person = 2.0;    // ppm added per step per person
  double air_exchange = 0.1;      // fraction of the gap removed per step, (0, 1]
  double base_temp = 21.0;        // degrees C
  double temp_per_person = 0.25;  // degrees C per person at equilibrium
  double base_humidity = 42.0;    // %RH
  double humidity_per_person = 0.4;
  double base_noise_db = 38.0;
  double noise_per_person = 1.2;
  double base_pressure = 1015.0;  // mbar
  double pressure_per_person = 0.02;
  // per-feature measurement/process noise sd: temp, hum, co2, noise, pressure
  std::array<double, kNumFeatures> sensor_noise_sd{0.05, 0.4, 5.0, 1.5, 0.3};
  int step_minutes = 5;
};

// Half-open step range [start_step, end_step) with a constant head count.
struct Session {
  int start_step = 0;
  int end_step = 0;
  int people = 0;
};

struct OccupancySchedule {
  std::vector<std::vector<Session>> days;  // ordered, non-overlapping per day
  int steps_per_day = 288;
};

// 0-3 sessions per day at plausible class hours, counts in [0, 15],
// deterministic from the seed.
OccupancySchedule gen_schedule(int days, std::uint64_t seed,
                               int steps_per_day = 288);

int occupancy_at(const OccupancySchedule& schedule, int day, int step);

// One reading per step per day; labels come straight from the schedule.
std::vector<SensorReading> gen_readings(const OccupancySchedule& schedule,
                                        const RoomParams& params,
                                        std::uint64_t seed);

// Ground-truth schedule dump: day,start_step,end_step,people
std::string schedule_to_csv(const OccupancySchedule& schedule);

}  // namespace occulstm
