#include "soop/orbits.hpp"

#include <SGP4.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "soop/constants.hpp"

namespace soop::orbits {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMinutesPerDay = 1440.0;
constexpr double kJd1950 = 2433281.5;  // SGP4 epoch origin

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

std::string_view trim(std::string_view s) {
    s = rtrim(s);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

// 1-based inclusive column slice.
std::string_view cols(std::string_view line, std::size_t first, std::size_t last) {
    return line.substr(first - 1, last - first + 1);
}

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double parse_double(std::string_view field, const char* name) {
    const std::string_view t = trim(field);
    if (t.empty()) throw FieldError(std::string("empty field ") + name);
    // strtod accepts "+.5", ".00000023" and "-.00000084"; from_chars rejects a leading '+'.
    const std::string s(t);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v))
        throw FieldError(std::string("malformed field ") + name + ": '" + s + "'");
    return v;
}

int parse_int(std::string_view field, const char* name) {
    const std::string_view t = trim(field);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw FieldError(std::string("malformed field ") + name + ": '" + std::string(field) + "'");
    return v;
}

// Catalog number, including the Alpha-5 scheme (A = 10 ... Z = 33, I and O skipped).
int parse_catalog_number(std::string_view field) {
    const std::string_view t = trim(field);
    if (!t.empty() && std::isalpha(static_cast<unsigned char>(t.front()))) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t.front())));
        if (c == 'I' || c == 'O') throw FieldError("invalid Alpha-5 catalog letter");
        int value = c - 'A' + 10;
        if (c > 'I') --value;
        if (c > 'O') --value;
        return value * 10000 + parse_int(t.substr(1), "catalog number");
    }
    return parse_int(t, "catalog number");
}

// Implied-decimal mantissa with exponent, e.g. " 28098-4" -> 0.28098e-4.
double parse_exponent_field(std::string_view field, const char* name) {
    std::string_view t = trim(field);
    if (t.empty()) throw FieldError(std::string("empty field ") + name);
    double sign = 1.0;
    if (t.front() == '-' || t.front() == '+') {
        if (t.front() == '-') sign = -1.0;
        t.remove_prefix(1);
    }
    const std::size_t exp_pos = t.find_last_of("+-");
    if (exp_pos == std::string_view::npos || exp_pos == 0)
        throw FieldError(std::string("malformed exponent field ") + name);
    const std::string_view mant = t.substr(0, exp_pos);
    const int exponent = (t[exp_pos] == '-' ? -1 : 1) * parse_int(t.substr(exp_pos + 1), name);
    for (char c : mant)
        if (c < '0' || c > '9') throw FieldError(std::string("malformed exponent field ") + name);
    const double m = parse_double("0." + std::string(mant), name);
    return sign * m * std::pow(10.0, exponent);
}

std::string format_exponent_field(double v) {
    // sign, five mantissa digits, signed exponent digit: " 28098-4"
    char sign = v < 0.0 ? '-' : ' ';
    const double a = std::abs(v);
    if (a == 0.0) return " 00000+0";
    int e = static_cast<int>(std::floor(std::log10(a))) + 1;
    long mant = std::lround(a / std::pow(10.0, e) * 1e5);
    if (mant >= 100000) {
        mant /= 10;
        ++e;
    }
    if (e < -9 || e > 9) throw std::invalid_argument("value out of range for TLE exponent field");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%05ld%c%d", sign, mant, e < 0 ? '-' : '+', std::abs(e));
    return buf;
}

OrbitalElements parse_pair(std::string_view l1, std::string_view l2, std::string name) {
    if (l1.size() < 69) throw FieldError("line 1 shorter than 69 columns");
    if (l2.size() < 69) throw FieldError("line 2 shorter than 69 columns");
    l1 = l1.substr(0, 69);
    l2 = l2.substr(0, 69);

    const int c1 = parse_int(cols(l1, 69, 69), "line 1 checksum");
    const int c2 = parse_int(cols(l2, 69, 69), "line 2 checksum");
    if (c1 != tle_checksum(l1)) throw FieldError("line 1 checksum mismatch");
    if (c2 != tle_checksum(l2)) throw FieldError("line 2 checksum mismatch");

    OrbitalElements e;
    e.name = std::move(name);
    e.satellite_id = parse_catalog_number(cols(l1, 3, 7));
    if (parse_catalog_number(cols(l2, 3, 7)) != e.satellite_id) throw FieldError("catalog numbers of lines 1 and 2 differ");

    const int yy = parse_int(cols(l1, 19, 20), "epoch year");
    const double day = parse_double(cols(l1, 21, 32), "epoch day");
    if (day < 1.0 || day >= 367.0) throw FieldError("epoch day out of range");
    e.epoch = from_tle_epoch(yy, day);
    e.mean_motion_dot = parse_double(cols(l1, 34, 43), "mean motion derivative");
    e.mean_motion_ddot = parse_exponent_field(cols(l1, 45, 52), "mean motion second derivative");
    e.bstar = parse_exponent_field(cols(l1, 54, 61), "bstar");

    e.inclination_deg = parse_double(cols(l2, 9, 16), "inclination");
    e.raan_deg = parse_double(cols(l2, 18, 25), "right ascension of the ascending node");
    const std::string_view ecc = trim(cols(l2, 27, 33));
    for (char c : ecc)
        if (c < '0' || c > '9') throw FieldError("malformed eccentricity");
    e.eccentricity = parse_double("0." + std::string(ecc), "eccentricity");
    e.arg_perigee_deg = parse_double(cols(l2, 35, 42), "argument of perigee");
    e.mean_anomaly_deg = parse_double(cols(l2, 44, 51), "mean anomaly");
    e.mean_motion_revday = parse_double(cols(l2, 53, 63), "mean motion");

    if (e.inclination_deg < 0.0 || e.inclination_deg > 180.0) throw FieldError("inclination outside [0, 180]");
    if (e.eccentricity < 0.0 || e.eccentricity >= 1.0) throw FieldError("eccentricity outside [0, 1)");
    if (!(e.mean_motion_revday > 0.0)) throw FieldError("mean motion must be positive");
    e.line_checksums_ok = true;
    return e;
}

bool starts_line(std::string_view s, char digit) {
    return s.size() >= 2 && s[0] == digit && s[1] == ' ';
}

}  // namespace

int tle_checksum(std::string_view line) {
    int sum = 0;
    for (std::size_t i = 0; i < std::min<std::size_t>(68, line.size()); ++i) {
        const char c = line[i];
        if (c >= '0' && c <= '9')
            sum += c - '0';
        else if (c == '-')
            sum += 1;
    }
    return sum % 10;
}

TleParseResult parse_tle(std::string_view text) {
    std::vector<std::string_view> lines;
    {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t nl = text.find('\n', pos);
            const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
            lines.push_back(rtrim(text.substr(pos, end - pos)));
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
    }

    TleParseResult result;
    bool any_content = false;
    std::size_t i = 0;
    while (i < lines.size()) {
        const std::string_view line = lines[i];
        if (trim(line).empty()) {
            ++i;
            continue;
        }
        any_content = true;

        std::string name;
        std::size_t first = i;
        if (!starts_line(line, '1')) {
            // Title line of a 3-line set; "0 " prefixes are stripped.
            std::string_view t = trim(line);
            if (t.size() >= 2 && t[0] == '0' && t[1] == ' ') t = trim(t.substr(2));
            name = std::string(t);
            first = i + 1;
        }
        if (first + 1 >= lines.size() || !starts_line(lines[first], '1') || !starts_line(lines[first + 1], '2')) {
            result.diagnostics.push_back({i + 1, "expected a '1 '/'2 ' element line pair"});
            ++i;
            continue;
        }
        try {
            result.records.push_back(parse_pair(lines[first], lines[first + 1], std::move(name)));
        } catch (const FieldError& err) {
            result.diagnostics.push_back({first + 1, err.what()});
        }
        i = first + 2;
    }

    if (!any_content) {
        result.diagnostics.push_back({0, "no records"});
        return result;
    }
    if (result.records.empty()) {
        std::ostringstream msg;
        msg << "no valid element set in input";
        if (!result.diagnostics.empty())
            msg << " (line " << result.diagnostics.front().line << ": " << result.diagnostics.front().message << ")";
        throw TleError(msg.str(), result.diagnostics);
    }
    return result;
}

TleParseResult load_tle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open TLE file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_tle(buf.str());
    } catch (const TleError& e) {
        throw TleError(path + ": " + e.what(), e.diagnostics());
    }
}

std::pair<std::string, std::string> format_tle(const OrbitalElements& e) {
    if (e.satellite_id < 0 || e.satellite_id > 99999) throw std::invalid_argument("catalog number outside 0..99999");

    using namespace std::chrono;
    const auto day_start = floor<days>(e.epoch);
    const year_month_day ymd{day_start};
    const auto jan1 = sys_days{ymd.year() / January / 1};
    const double day_of_year = 1.0 + static_cast<double>((e.epoch - jan1).count()) / 86'400e9;
    const int yy = static_cast<int>(ymd.year()) % 100;

    const double ndot = e.mean_motion_dot;
    char ndot_buf[32];
    std::snprintf(ndot_buf, sizeof ndot_buf, "%c.%08ld", ndot < 0.0 ? '-' : ' ', std::lround(std::abs(ndot) * 1e8));

    char l1[80];
    std::snprintf(l1, sizeof l1, "1 %05dU %-8s %02d%012.8f %s %s %s 0 %4d", e.satellite_id, "24001A", yy,
                  day_of_year, ndot_buf, format_exponent_field(e.mean_motion_ddot).c_str(),
                  format_exponent_field(e.bstar).c_str(), 999);
    char l2[80];
    std::snprintf(l2, sizeof l2, "2 %05d %8.4f %8.4f %07ld %8.4f %8.4f %11.8f%5d", e.satellite_id, e.inclination_deg,
                  e.raan_deg, std::lround(e.eccentricity * 1e7), e.arg_perigee_deg, e.mean_anomaly_deg,
                  e.mean_motion_revday, 1);
    std::string line1(l1), line2(l2);
    if (line1.size() != 68 || line2.size() != 68) throw std::invalid_argument("element value overflows its TLE column");
    line1 += static_cast<char>('0' + tle_checksum(line1));
    line2 += static_cast<char>('0' + tle_checksum(line2));
    return {line1, line2};
}

// ---------------------------------------------------------------------------
// Propagation

struct Propagator::Impl {
    elsetrec satrec{};
};

Propagator::Propagator(const OrbitalElements& elements, PropagationOptions options)
    : elements_(elements), options_(options), impl_(std::make_unique<Impl>()) {
    const double xpdotp = kMinutesPerDay / kTwoPi;  // rev/day -> rad/min
    const JulianDate jd = julian_date(elements.epoch);
    const double epoch_1950 = (jd.whole - kJd1950) + jd.fraction;

    char satn[9];
    std::snprintf(satn, sizeof satn, "%05d", elements.satellite_id % 100000);
    const bool ok = SGP4Funcs::sgp4init(
        wgs72, 'i', satn, epoch_1950, elements.bstar, elements.mean_motion_dot / (xpdotp * kMinutesPerDay),
        elements.mean_motion_ddot / (xpdotp * kMinutesPerDay * kMinutesPerDay), elements.eccentricity,
        elements.arg_perigee_deg * kDegToRad, elements.inclination_deg * kDegToRad,
        elements.mean_anomaly_deg * kDegToRad, elements.mean_motion_revday / xpdotp, elements.raan_deg * kDegToRad,
        impl_->satrec);
    impl_->satrec.jdsatepoch = jd.whole;
    impl_->satrec.jdsatepochF = jd.fraction;
    if (!ok || impl_->satrec.error != 0) {
        const int code = impl_->satrec.error;
        if (code == 6) throw DecayedOrbit("satellite " + std::to_string(elements.satellite_id) + " has decayed");
        throw PropagationError("SGP4 initialisation failed for satellite " + std::to_string(elements.satellite_id) +
                                   " (error " + std::to_string(code) + ")",
                               code);
    }
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

SatelliteState Propagator::propagate_minutes(double minutes) const {
    // sgp4() writes scratch fields into the record; work on a copy so the
    // propagator stays const and thread-safe.
    elsetrec rec = impl_->satrec;
    double r[3], v[3];
    const bool ok = SGP4Funcs::sgp4(rec, minutes, r, v);
    const std::string id = std::to_string(elements_.satellite_id);
    if (!ok || rec.error != 0) {
        // Mid-propagation, error 1 means drag drove the mean eccentricity out
        // of range; like error 6 it only happens on a decaying orbit.
        if (rec.error == 6 || rec.error == 1) throw DecayedOrbit("satellite " + id + " has decayed");
        throw PropagationError("SGP4 error " + std::to_string(rec.error) + " for satellite " + id, rec.error);
    }
    for (int k = 0; k < 3; ++k)
        if (!std::isfinite(r[k]) || !std::isfinite(v[k]))
            throw PropagationError("non-finite SGP4 state for satellite " + id, -1);

    SatelliteState s;
    s.epoch = elements_.epoch + std::chrono::nanoseconds{std::llround(minutes * 60e9)};
    s.position_eci_m = {r[0] * 1e3, r[1] * 1e3, r[2] * 1e3};
    s.velocity_eci_mps = {v[0] * 1e3, v[1] * 1e3, v[2] * 1e3};
    s.stale = std::abs(minutes) > options_.max_staleness_days * kMinutesPerDay;
    return s;
}

SatelliteState Propagator::propagate(UtcTime epoch) const {
    SatelliteState s = propagate_minutes(minutes_between(epoch, elements_.epoch));
    s.epoch = epoch;
    return s;
}

SatelliteState propagate(const OrbitalElements& elements, UtcTime epoch, PropagationOptions options) {
    return Propagator(elements, options).propagate(epoch);
}

// ---------------------------------------------------------------------------
// Frames

double gmst_rad(UtcTime t) {
    const JulianDate jd = julian_date(t);
    const double tut1 = ((jd.whole - 2451545.0) + jd.fraction) / 36525.0;
    double seconds = -6.2e-6 * tut1 * tut1 * tut1 + 0.093104 * tut1 * tut1 +
                     (876600.0 * 3600.0 + 8640184.812866) * tut1 + 67310.54841;
    double angle = std::fmod(seconds * kDegToRad / 240.0, kTwoPi);
    if (angle < 0.0) angle += kTwoPi;
    return angle;
}

Vec3 teme_to_ecef(const Vec3& teme, double gmst) {
    const double c = std::cos(gmst), s = std::sin(gmst);
    return {c * teme[0] + s * teme[1], -s * teme[0] + c * teme[1], teme[2]};
}

Vec3 eci_to_ecef(const SatelliteState& state) {
    return teme_to_ecef(state.position_eci_m, gmst_rad(state.epoch));
}

void GroundSite::validate_and_normalize() {
    if (!std::isfinite(latitude_deg) || std::abs(latitude_deg) > 90.0)
        throw std::invalid_argument("site '" + name + "': latitude outside [-90, 90]");
    if (!std::isfinite(longitude_deg) || !std::isfinite(altitude_m))
        throw std::invalid_argument("site '" + name + "': non-finite coordinate");
    double lon = std::fmod(longitude_deg, 360.0);
    if (lon > 180.0) lon -= 360.0;
    if (lon <= -180.0) lon += 360.0;
    longitude_deg = lon;
}

Vec3 geodetic_to_ecef(double latitude_deg, double longitude_deg, double altitude_m) {
    const double a = kWgs84SemiMajorAxisM;
    const double e2 = kWgs84Flattening * (2.0 - kWgs84Flattening);
    const double lat = latitude_deg * kDegToRad, lon = longitude_deg * kDegToRad;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double n = a / std::sqrt(1.0 - e2 * sl * sl);
    return {(n + altitude_m) * cl * std::cos(lon), (n + altitude_m) * cl * std::sin(lon),
            (n * (1.0 - e2) + altitude_m) * sl};
}

Vec3 site_ecef(const GroundSite& site) {
    return geodetic_to_ecef(site.latitude_deg, site.longitude_deg, site.altitude_m);
}

Geodetic ecef_to_geodetic(const Vec3& p) {
    const double a = kWgs84SemiMajorAxisM;
    const double f = kWgs84Flattening;
    const double e2 = f * (2.0 - f);
    const double b = a * (1.0 - f);
    const double ep2 = (a * a - b * b) / (b * b);
    const double rho = std::hypot(p[0], p[1]);
    const double lon = std::atan2(p[1], p[0]);
    if (rho < 1e-9) {
        const double lat = p[2] >= 0.0 ? 90.0 : -90.0;
        return {lat, lon * kRadToDeg, std::abs(p[2]) - b};
    }
    // Bowring's parametric-latitude iteration; three passes reach double precision.
    double beta = std::atan2(p[2], (1.0 - f) * rho);
    double lat = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double sb = std::sin(beta), cb = std::cos(beta);
        lat = std::atan2(p[2] + ep2 * b * sb * sb * sb, rho - e2 * a * cb * cb * cb);
        beta = std::atan2((1.0 - f) * std::sin(lat), std::cos(lat));
    }
    const double sl = std::sin(lat);
    const double n = a / std::sqrt(1.0 - e2 * sl * sl);
    const double h = rho * std::cos(lat) + (p[2] + e2 * n * sl) * sl - n;
    return {lat * kRadToDeg, lon * kRadToDeg, h};
}

EnuBasis enu_basis(double latitude_deg, double longitude_deg) {
    const double lat = latitude_deg * kDegToRad, lon = longitude_deg * kDegToRad;
    const double sl = std::sin(lat), cl = std::cos(lat), so = std::sin(lon), co = std::cos(lon);
    return {{-so, co, 0.0}, {-sl * co, -sl * so, cl}, {cl * co, cl * so, sl}};
}

LookAngles look_angles(const GroundSite& site, const Vec3& sat_ecef_m) {
    const Vec3 rho = sat_ecef_m - site_ecef(site);
    const double range = norm(rho);
    if (!(range > 1e-6)) throw std::invalid_argument("satellite coincides with the site");
    const EnuBasis enu = enu_basis(site.latitude_deg, site.longitude_deg);
    const double e = dot(rho, enu.east), n = dot(rho, enu.north), u = dot(rho, enu.up);
    const double el = std::atan2(u, std::hypot(e, n)) * kRadToDeg;
    double az = std::atan2(e, n) * kRadToDeg;
    if (az < 0.0) az += 360.0;
    if (az >= 360.0) az -= 360.0;
    return {el, az, range};
}

double off_nadir_angle(const Vec3& sat_ecef_m, const Vec3& site_ecef_m) {
    const Vec3 nadir = -sat_ecef_m;
    const Vec3 to_site = site_ecef_m - sat_ecef_m;
    if (!(norm(nadir) > 0.0) || !(norm(to_site) > 0.0) || !(norm(site_ecef_m) > 0.0))
        throw std::invalid_argument("off-nadir angle of a degenerate vector");
    return std::atan2(norm(cross(nadir, to_site)), dot(nadir, to_site)) * kRadToDeg;
}

void VisibilityRule::validate() const {
    if (!(masking_angle_deg >= 0.0 && masking_angle_deg < 90.0))
        throw std::invalid_argument("masking angle must lie in [0, 90)");
    if (!(beamwidth_deg > 0.0 && beamwidth_deg <= 90.0)) throw std::invalid_argument("beamwidth must lie in (0, 90]");
}

bool is_visible(double elevation_deg, double off_nadir_deg, const VisibilityRule& rule) {
    return elevation_deg >= rule.masking_angle_deg && off_nadir_deg <= rule.beamwidth_deg;
}

}  // namespace soop::orbits
