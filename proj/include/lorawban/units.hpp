#pragma once

// dB / linear conversions. Internal power quantities are linear milliwatts.

#include <cmath>

namespace lorawban::units {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }
inline double dbm_to_watts(double dbm) { return dbm_to_mw(dbm) * 1e-3; }
inline double mw_to_watts(double mw) { return mw * 1e-3; }

inline double km_to_m(double km) { return km * 1e3; }

}  // namespace lorawban::units
