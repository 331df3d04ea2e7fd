#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "soop/time.hpp"
#include "soop/vec3.hpp"

namespace soop::orbits {

/// Mean elements of one NORAD two-line element set.
struct OrbitalElements {
    std::string name;          // from the optional title line, may be empty
    int satellite_id = 0;
    UtcTime epoch{};
    double mean_motion_revday = 0.0;
    double mean_motion_dot = 0.0;   // rev/day^2 / 2, carried for completeness
    double mean_motion_ddot = 0.0;  // rev/day^3 / 6
    double eccentricity = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double arg_perigee_deg = 0.0;
    double mean_anomaly_deg = 0.0;
    double bstar = 0.0;
    bool line_checksums_ok = false;
};

struct TleDiagnostic {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct TleParseResult {
    std::vector<OrbitalElements> records;
    std::vector<TleDiagnostic> diagnostics;
};

class TleError : public std::runtime_error {
public:
    TleError(const std::string& what, std::vector<TleDiagnostic> diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::vector<TleDiagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<TleDiagnostic> diagnostics_;
};

/// Modulo-10 checksum over the first 68 columns ('-' counts as 1).
int tle_checksum(std::string_view line);

/// Parses 2-line and 3-line (titled) element sets. Lines may end in CRLF and
/// may carry extra columns past 69, which are ignored. Records failing the
/// layout or checksum rules are skipped with a line-numbered diagnostic.
/// Empty input yields no records and a "no records" diagnostic; non-empty
/// input with no valid record throws TleError.
TleParseResult parse_tle(std::string_view text);

/// Reads and parses a TLE file; throws std::runtime_error if unreadable.
TleParseResult load_tle_file(const std::string& path);

/// Formats elements back into two 69-column lines with valid checksums.
std::pair<std::string, std::string> format_tle(const OrbitalElements& elements);

struct SatelliteState {
    UtcTime epoch{};
    Vec3 position_eci_m{};   // TEME
    Vec3 velocity_eci_mps{};
    bool stale = false;      // elements older/newer than the staleness guard
};

class DecayedOrbit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

struct PropagationOptions {
    double max_staleness_days = 14.0;
};

/// SGP4 (WGS-72, improved mode) initialised once per element set.
class Propagator {
public:
    /// Throws PropagationError / DecayedOrbit if the elements do not initialise.
    explicit Propagator(const OrbitalElements& elements, PropagationOptions options = {});
    ~Propagator();
    Propagator(Propagator&&) noexcept;
    Propagator& operator=(Propagator&&) noexcept;
    Propagator(const Propagator&) = delete;
    Propagator& operator=(const Propagator&) = delete;

    /// State at a UTC instant. Throws DecayedOrbit when SGP4 reports a
    /// decayed orbit (error 6, or error 1 from a drag-collapsed
    /// eccentricity) and PropagationError for the other error codes.
    SatelliteState propagate(UtcTime epoch) const;

    /// State `minutes` after the element epoch, as tabulated by the SGP4
    /// verification vectors.
    SatelliteState propagate_minutes(double minutes) const;

    const OrbitalElements& elements() const { return elements_; }

private:
    struct Impl;
    OrbitalElements elements_;
    PropagationOptions options_;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around Propagator.
SatelliteState propagate(const OrbitalElements& elements, UtcTime epoch, PropagationOptions options = {});

/// Greenwich mean sidereal time (IAU-1982), radians in [0, 2 pi), UT1 = UTC.
double gmst_rad(UtcTime t);

/// Rotation of a TEME vector into the Earth-fixed frame by the given GMST.
Vec3 teme_to_ecef(const Vec3& teme, double gmst);

/// TEME -> ECEF position at the state's epoch (polar motion neglected).
Vec3 eci_to_ecef(const SatelliteState& state);

struct GroundSite {
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;

    /// Throws std::invalid_argument if |lat| > 90; wraps longitude into (-180, 180].
    void validate_and_normalize();
};

Vec3 geodetic_to_ecef(double latitude_deg, double longitude_deg, double altitude_m);
Vec3 site_ecef(const GroundSite& site);

/// Geodetic latitude/longitude (deg) and height (m) of an ECEF point.
struct Geodetic {
    double latitude_deg;
    double longitude_deg;
    double altitude_m;
};
Geodetic ecef_to_geodetic(const Vec3& ecef);

/// East, north and up unit vectors of the local tangent plane.
struct EnuBasis {
    Vec3 east, north, up;
};
EnuBasis enu_basis(double latitude_deg, double longitude_deg);

struct LookAngles {
    double elevation_deg;
    double azimuth_deg;   // clockwise from north, [0, 360)
    double slant_range_m;
};

/// Throws std::invalid_argument when the satellite coincides with the site.
LookAngles look_angles(const GroundSite& site, const Vec3& sat_ecef_m);

/// Angle at the satellite between its nadir (-position) and the line to the
/// site, in degrees. Throws std::invalid_argument on zero vectors.
double off_nadir_angle(const Vec3& sat_ecef_m, const Vec3& site_ecef_m);

struct VisibilityRule {
    double masking_angle_deg = 10.0;  // minimum elevation
    double beamwidth_deg = 90.0;      // half-cone about nadir at the satellite

    void validate() const;
};

/// True iff elevation >= masking angle and off-nadir <= beamwidth.
bool is_visible(double elevation_deg, double off_nadir_deg, const VisibilityRule& rule);

}  // namespace soop::orbits
