#include "eagle_eye/gimbal.hpp"
#include "eagle_eye/testkit/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace eagle_eye;

TEST(Servo, AtTargetStaysPut)
{
    const PwmCommand cmd = angles_to_pwm({12.0, -7.5});
    const PanTilt target = pwm_to_angles(cmd);
    const GimbalState s{target.pan_deg, target.tilt_deg, target.pan_deg, target.tilt_deg};
    EXPECT_EQ(step_servo(s, cmd, 0.02), s);
}

TEST(Servo, RateLimitBoundsOneStep)
{
    ServoModel m;
    m.time_constant_s = 0.001;
    const GimbalState s = step_servo({}, angles_to_pwm({60.0, -60.0}), 0.02, m);
    EXPECT_LE(std::fabs(s.pan_deg), 10.0 + 1e-12);
    EXPECT_LE(std::fabs(s.tilt_deg), 10.0 + 1e-12);
    EXPECT_NEAR(s.pan_deg, 10.0, 1e-12);
}

TEST(Servo, StepResponseMatchesClosedForm)
{
    const ServoModel m;
    for (double step : {40.0, 5.0, -60.0, 14.9, 0.7}) {
        const PwmCommand cmd = angles_to_pwm({step, -step / 2});
        const PanTilt target = pwm_to_angles(cmd);
        GimbalState s;
        double prev_pan = std::fabs(target.pan_deg);
        for (int k = 1; k <= 50; ++k) {
            s = step_servo(s, cmd, 0.02, m);
            const double t = 0.02 * k;
            const double pan_err = std::fabs(target.pan_deg - s.pan_deg);
            const double tilt_err = std::fabs(target.tilt_deg - s.tilt_deg);
            EXPECT_NEAR(pan_err, oracle::servo_error(std::fabs(target.pan_deg), t, 0.03, 500.0), 1e-6);
            EXPECT_NEAR(tilt_err, oracle::servo_error(std::fabs(target.tilt_deg), t, 0.03, 500.0), 1e-6);
            EXPECT_LE(pan_err, prev_pan);
            prev_pan = pan_err;
        }
        EXPECT_LE(std::fabs(target.pan_deg - s.pan_deg), 0.1);
        EXPECT_LE(std::fabs(target.tilt_deg - s.tilt_deg), 0.1);
    }
}

TEST(Servo, SplittingTheIntervalDoesNotMatter)
{
    const ServoModel m;
    for (double dt : {0.001, 0.004, 0.01}) {
        double a = 0.0;
        for (int k = 0; k < static_cast<int>(std::lround(0.2 / dt)); ++k) {
            a = advance_axis(a, 45.0, dt, m);
        }
        EXPECT_NEAR(a, advance_axis(0.0, 45.0, 0.2, m), 1e-9) << dt;
    }
}

TEST(Servo, FuzzedCommandsNeverExceedLimits)
{
    const ServoModel m;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        testkit::UnitStream u(seed);
        GimbalState s;
        for (int k = 0; k < 40; ++k) {
            PwmCommand cmd;
            cmd.pan_pulse_us = 500 + static_cast<int>(u.next() * 2000.0);
            cmd.tilt_pulse_us = 500 + static_cast<int>(u.next() * 2000.0);
            s = step_servo(s, cmd, 0.0005 + u.next() * 0.1, m);
            ASSERT_LE(std::fabs(s.pan_deg), m.limit_deg);
            ASSERT_LE(std::fabs(s.tilt_deg), m.limit_deg);
            ASSERT_LE(std::fabs(s.pan_cmd_deg), m.limit_deg);
        }
    }
}

TEST(Servo, NarrowLimitsClampCommands)
{
    ServoModel m;
    m.limit_deg = 20.0;
    GimbalState s;
    for (int k = 0; k < 100; ++k) {
        s = step_servo(s, angles_to_pwm({55.0, -40.0}), 0.02, m);
    }
    EXPECT_DOUBLE_EQ(s.pan_deg, 20.0);
    EXPECT_DOUBLE_EQ(s.tilt_deg, -20.0);
}

TEST(Servo, SameScheduleGivesIdenticalTrajectory)
{
    auto run = [] {
        testkit::UnitStream u(42);
        std::vector<GimbalState> traj;
        GimbalState s;
        for (int k = 0; k < 200; ++k) {
            PwmCommand cmd{1000 + static_cast<int>(u.next() * 1000), 1000 + static_cast<int>(u.next() * 1000), 20.0,
                           false};
            s = step_servo(s, cmd, 0.02);
            traj.push_back(s);
        }
        return traj;
    };
    EXPECT_EQ(run(), run());
}

TEST(Servo, RejectsNonPositiveStep)
{
    EXPECT_THROW((void)step_servo({}, angles_to_pwm({1.0, 1.0}), 0.0), InvalidInput);
    ServoModel bad;
    bad.max_rate_deg_s = 0.0;
    EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(PwmLog, CsvLayout)
{
    std::ostringstream os;
    write_pwm_log(os, {{0.02, 1757, 1600, 10.0, 2.5}});
    EXPECT_EQ(os.str(), "t_s,pan_pulse_us,tilt_pulse_us,pan_deg,tilt_deg\n0.020000,1757,1600,10.000000,2.500000\n");
}
