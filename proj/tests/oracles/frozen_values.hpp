#pragma once

// Generated by tests/oracles/derive.py; do not edit by hand.

namespace affdim::oracle {

inline constexpr double kShearSigma1 = 3.302775637731995;
inline constexpr double kSimilarityDim = 1.2618595071429148;
inline constexpr double kDiagThreeDim = 1.292481250360578;
inline constexpr double kSierpinskiDim = 1.5849625007211563;
inline constexpr double kDeffyUnprojected8 = 2.024476170539856;
inline constexpr double kDeffyProjectedIP8 = 1.1415982246398926;
inline constexpr double kDeffyGap8 = 0.8828779458999634;
inline constexpr double kDeffyUnprojected12 = 2.0163492560386658;
inline constexpr double kDeffyProjectedIP12 = 1.136501431465149;
inline constexpr double kDeffyGap12 = 0.8798478245735168;
inline constexpr double kDeffyProjectedPI8 = 1.2564519047737122;
inline constexpr double kDeffyBase8 = 1.1415982246398926;
inline constexpr double kAdmissibleNormA = 0.32541553651755134;
inline constexpr double kAdmissibleDetA = 0.10074999999999996;
inline constexpr double kAdmissibleLambdaRatio = 1.0483870967741935;
inline constexpr double kAdmissibleMuRatio = 1.0139530762082092;
inline constexpr double kTensorDim8 = 1.2402223944664001;
inline constexpr double kTensorKronBound8 = 1.2332496047019958;
inline constexpr double kTensorGap8 = 0.006972789764404297;
inline constexpr double kTensorProjected8 = 1.22490394115448;
inline constexpr double kBaseDim8 = 1.2248599529266357;
inline constexpr double kLiftedDim8 = 1.234834909439087;
inline constexpr double kPressureOneLower = 0.21383362239634704;
inline constexpr double kPressureTwoUpper = -0.859010317743712;
inline constexpr double kBaseEnvelopeS1Level10 = 0.2636377020702122;
inline constexpr double kLiftedEnvelopeS2Level8 = -0.8590169907181844;
inline constexpr double kRenderPanelPI = 1.635880747500607;
inline constexpr double kRenderPanelIP = 1.1051021963183942;

}  // namespace affdim::oracle
