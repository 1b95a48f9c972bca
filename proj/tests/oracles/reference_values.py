"""Independent high-precision evaluation of the closed-form quantities frozen
into the C++ unit tests. Run with: python3 reference_values.py

Everything here is evaluated symbol by symbol with mpmath at 40 digits and
shares no code with the library.
"""
import mpmath as mp

mp.mp.dps = 40
c = mp.mpf(299792458)


def n_liio3_o(lam_m):
    l2 = (lam_m * mp.mpf(10) ** 6) ** 2
    return mp.sqrt(mp.mpf("3.415716") + mp.mpf("0.047031") / (l2 - mp.mpf("0.035306")) - mp.mpf("0.008801") * l2)


def n_liio3_e(lam_m):
    l2 = (lam_m * mp.mpf(10) ** 6) ** 2
    return mp.sqrt(mp.mpf("2.918692") + mp.mpf("0.035145") / (l2 - mp.mpf("0.028224")) - mp.mpf("0.003641") * l2)


lp = mp.mpf("405e-9")
ls = mp.mpf("810e-9")
wp = 2 * mp.pi * c / lp
ws = wp / 2
wi = wp / 2
no810 = n_liio3_o(ls)
ne405 = n_liio3_e(lp)
print("n_o(405nm) =", mp.nstr(n_liio3_o(lp), 17))
print("n_o(810nm) =", mp.nstr(no810, 17))
print("n_e(405nm) =", mp.nstr(ne405, 17))

phi = mp.acos((wp * ne405 / c) / (2 * ws * no810 / c))
print("phase-matched angle rad =", mp.nstr(phi, 17), " deg =", mp.nstr(mp.degrees(phi), 17))

theta = mp.radians(mp.mpf("17.1"))
print("external(17.1 deg, n_o(810)) rad =", mp.nstr(mp.asin(no810 * mp.sin(theta)), 17))


def mismatch(px, py, qx, qy, phi1, phi2, w_s=ws, w_i=wi):
    ks = mp.sqrt((w_s * n_liio3_o(2 * mp.pi * c / w_s) / c) ** 2 - px ** 2 - py ** 2)
    ki = mp.sqrt((w_i * n_liio3_o(2 * mp.pi * c / w_i) / c) ** 2 - qx ** 2 - qy ** 2)
    w_p = w_s + w_i
    d0 = py * mp.cos(phi1) + qy * mp.cos(phi2) - ks * mp.sin(phi1) - ki * mp.sin(phi2)
    kp = mp.sqrt((w_p * n_liio3_e(2 * mp.pi * c / w_p) / c) ** 2 - (px + qx) ** 2 - d0 ** 2)
    dk = kp - ks * mp.cos(phi1) - ki * mp.cos(phi2) - py * mp.sin(phi1) - qy * mp.sin(phi2)
    return dk, d0


dk, d0 = mismatch(0, mp.mpf(10) ** 4, 0, 0, phi, -phi)
print("delta_k(p=(0,1e4)) =", mp.nstr(dk, 17), " delta_0 =", mp.nstr(d0, 17))
dk, d0 = mismatch(mp.mpf(10) ** 4, 0, 0, 0, phi, -phi)
print("delta_k(p=(1e4,0)) =", mp.nstr(dk, 17), " delta_0 =", mp.nstr(d0, 17))

L = mp.mpf("5e-3")
w0 = mp.mpf("32e-6")
dk, d0 = mismatch(0, 2 * mp.mpf(10) ** 4, 0, 0, phi, -phi)
x = dk * L / 2
env = mp.exp(-(d0 ** 2) * w0 ** 2 / 4)
print("|Phi(p=(0,2e4)), w0=32um, L=5mm| =", mp.nstr(abs(env * mp.sin(x) / x), 17))

# 2-f map
print("position_to_wavevector(1mm, 810nm, 250mm) =", mp.nstr(2 * mp.pi * mp.mpf("1e-3") / (ls * mp.mpf("0.25")), 17))

# First sinc zero along the signal y axis (idler at the origin), point detector.
k_map = 2 * mp.pi / (ls * mp.mpf("0.25"))
ystar = mp.findroot(lambda y: mismatch(0, k_map * y, 0, 0, phi, -phi)[0] * L / 2 + mp.pi, mp.mpf("1.5e-4"))
print("first sinc zero y* (delta_k L/2 = -pi) =", mp.nstr(ystar, 17))

# sinc^2 = e^-2
u = mp.findroot(lambda t: mp.sin(t) / t - mp.exp(-1), 2.2)
print("sinc(u)^2 = e^-2 at u =", mp.nstr(u, 17))

print("L_nc(32um, 17.1deg) =", mp.nstr(mp.mpf("32e-6") / mp.sin(theta), 17))
print("L_nc(500um, 17.1deg) =", mp.nstr(mp.mpf("500e-6") / mp.sin(theta), 17))
print("thin width(810nm, 250mm, 500um) =", mp.nstr(ls * mp.mpf("0.25") / (mp.pi * mp.mpf("500e-6")), 17))
print("L_nc(32um, phase-matched angle) =", mp.nstr(mp.mpf("32e-6") / mp.sin(phi), 17))
