#pragma once

// Frozen output of tests/oracle/reference_values.py (mpmath, 30 digits; scipy expm for the
// dense step). Regenerate rather than edit by hand.
namespace ref {

inline constexpr double kGamma                       = 577.35026918962576;  // tan(pi/6) / 1 mm, 1/m
inline constexpr double kNthAxial1mK                 = 207.8665912977147;  // Bose occupation at 1 mK, 2 pi 100 kHz
inline constexpr double kNthRadial1p2mK              = 24.507275682157818;  // Bose occupation at 1.2 mK, 2 pi 1 MHz
inline constexpr double kNthRadial0p11mK             = 1.828271179955072;  // Bose occupation at 0.11 mK, 2 pi 1 MHz
inline constexpr double kThermalR1mK                 = 41.681236703601994;  // coth(hbar wx0 / 2 kB 1 mK)
inline constexpr double kThermalR1p2mK               = 50.014551364315637;  // coth(hbar wx0 / 2 kB 1.2 mK)
inline constexpr double kCouplingAtMinus1p1um        = 4.2148095038839027e-31;  // g(z = -1.1 um), J
inline constexpr double kRadialFreqRatioAtMinus1p1um = 1.0012713816176355;  // omega_x / omega_x0
inline constexpr double kForceAtR50                  = 1.9127816912139239e-23;  // gamma hbar wx0 R at z = 0, R = 50, N
inline constexpr double kHalfKT1mK                   = 6.903245e-27;  // equipartition energy at 1 mK, J
inline constexpr double kZ0Std1mK                    = 7.2561663178309207e-7;  // axial thermal spread at 1 mK, m
inline constexpr double kShiftPerR                   = 1.4589035339590743e-11;  // hbar wx0 gamma / (m wz^2), m
inline constexpr double kDeltaZHighT0p2mK            = 2.4318893834726112e-10;  // 4 kB gamma dT / (m wz^2) at dT = 0.2 mK, m
inline constexpr double kDeltaZExact1p2to1mK         = -2.4315004416216196e-10;  // growth per cycle T1 = 1.2 mK, T2 = 1.0 mK, m
inline constexpr double kAmplitudeN1e5               = 2.4318893834726112e-5;  // 2 N delta_z, N = 1e5, dT = 0.1 mK (HighT), m
inline constexpr double kStrobeZ8                    = -1.1009726001766486e-6;  // z_8 for z0 = -1.1 um, T1 = 1.2 mK, T2 = 1.0 mK, m
inline constexpr double kAmplification1p5            = 10.092769451736187;  // cosh 3 + sinh 3 / 399
inline constexpr double kAmplification1p13           = 4.8555979444087063;  // cosh 2.26 + sinh 2.26 / 399
inline constexpr double kThreshold0p11mK             = 1.115710185220042;  // r* for n_th(0.11 mK)
inline constexpr double kSensitivity250nmN1e5        = 1.4538218431975633e-6;  // sqrt2 sigma / (2 N 4 kB gamma / m wz^2), K
inline constexpr double kSincTenthTau                = 0.99589273524356137;  // window average of cos(wz t) over 0.1 tau_z
inline constexpr double kDenseStepN                  = 0.98291459088376909;  // <N> after one exact step, dim 12 test state
inline constexpr double kDenseStepA2Re               = 1.2081346992594235;  // Re <a^2> after one exact step
inline constexpr double kDenseStepA2Im               = -0.076180136513253505;  // Im <a^2> after one exact step

}  // namespace ref
