# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled duel kernel.

Bit-for-bit transliteration of the pure-Python duel loop (duel.py plus
network.py): same formulas, same operation order, same libm calls, so
both backends produce identical outcomes and replays. Keep the two in
sync when touching either.
"""

from libc.math cimport M_PI, atan2, cos, exp, fabs, sin, sqrt
from libc.stdlib cimport free, malloc

cdef double S18 = sin(0.1 * M_PI)
cdef double C18 = cos(0.1 * M_PI)
cdef double S54 = sin(0.3 * M_PI)
cdef double C54 = cos(0.3 * M_PI)

COMPILED = True


cdef inline double sigmoid(double slope, double x):
    cdef double z = -slope * x
    if z > 709.0:
        return 0.0
    return 1.0 / (1.0 + exp(z))


cdef inline int sector_of(double u, double v):
    if u < 0.0 or (u == 0.0 and v >= 0.0):
        return -1
    if S54 * u + C54 * v < 0.0:
        return 0
    if S18 * u + C18 * v < 0.0:
        return 1
    if S18 * u - C18 * v > 0.0:
        return 2
    if S54 * u - C54 * v > 0.0:
        return 3
    return 4


cdef void fill_senses(double mx, double my, double mhx, double mhy,
                      double ox, double oy,
                      double me_energy, double opp_energy,
                      double* food_x, double* food_y, char* eaten, int n_food,
                      double sensor_range, double wall_range,
                      double initial_energy, double* out):
    cdef double best[5]
    cdef int i, sec
    cdef double dx, dy, u, v, d, dw, t, ediff
    for i in range(5):
        best[i] = -1.0
    for i in range(n_food):
        if eaten[i]:
            continue
        dx = food_x[i] - mx
        dy = food_y[i] - my
        u = dx * mhx + dy * mhy
        v = dy * mhx - dx * mhy
        sec = sector_of(u, v)
        if sec < 0:
            continue
        d = sqrt(dx * dx + dy * dy)
        if best[sec] < 0.0 or d < best[sec]:
            best[sec] = d
    for i in range(5):
        if best[i] < 0.0 or best[i] >= sensor_range:
            out[i] = 0.0
        else:
            out[i] = 1.0 - best[i] / sensor_range
    for i in range(5):
        best[i] = -1.0
    dx = ox - mx
    dy = oy - my
    u = dx * mhx + dy * mhy
    v = dy * mhx - dx * mhy
    sec = sector_of(u, v)
    if sec >= 0:
        best[sec] = sqrt(dx * dx + dy * dy)
    for i in range(5):
        if best[i] < 0.0 or best[i] >= sensor_range:
            out[5 + i] = 0.0
        else:
            out[5 + i] = 1.0 - best[i] / sensor_range
    dw = 300.0 - mx
    t = 300.0 + mx
    if t < dw:
        dw = t
    t = 300.0 - my
    if t < dw:
        dw = t
    t = 300.0 + my
    if t < dw:
        dw = t
    t = 1.0 - dw / wall_range
    if t < 0.0:
        t = 0.0
    out[10] = t
    ediff = (me_energy - opp_energy) / initial_energy
    if ediff > 1.0:
        ediff = 1.0
    elif ediff < -1.0:
        ediff = -1.0
    out[11] = ediff


cdef void activate(int n_nodes, int n_inputs,
                   int[::1] starts, int[::1] srcs, double[::1] weights,
                   double* prev, double* nxt, double slope):
    cdef int i, k
    cdef double total
    for i in range(n_inputs):
        nxt[i] = prev[i]
    for i in range(n_inputs, n_nodes):
        total = 0.0
        for k in range(starts[i], starts[i + 1]):
            total = total + weights[k] * prev[srcs[k]]
        nxt[i] = sigmoid(slope, total)


cdef double do_move(double* x, double* y, double* hx, double* hy,
                    double left, double right, double forward):
    cdef double turn = 0.24 * (left - right)
    cdef double half = turn / 2.0
    cdef double c = cos(half)
    cdef double s = sin(half)
    cdef double nhx = hx[0] * c - hy[0] * s
    cdef double nhy = hx[0] * s + hy[0] * c
    cdef double dist = 1.33 * forward
    cdef double nx = x[0] + dist * nhx
    cdef double ny = y[0] + dist * nhy
    cdef double hx2 = nhx * c - nhy * s
    cdef double hy2 = nhx * s + nhy * c
    if nx > 300.0:
        nx = 300.0
    elif nx < -300.0:
        nx = -300.0
    if ny > 300.0:
        ny = 300.0
    elif ny < -300.0:
        ny = -300.0
    x[0] = nx
    y[0] = ny
    hx[0] = hx2
    hy[0] = hy2
    return fabs(turn) + dist


def run(int[::1] a_starts, int[::1] a_srcs, double[::1] a_weights, int a_nodes,
        int[::1] b_starts, int[::1] b_srcs, double[::1] b_weights, int b_nodes,
        int n_sensors, int n_inputs,
        double[::1] food_xy, int n_food,
        double ax, double ay, double ahx, double ahy,
        double bx, double by, double bhx, double bhy,
        double initial_energy, double food_energy,
        double pickup_radius, double collision_radius,
        double sensor_range, double wall_range,
        double slope, int max_steps, bint record,
        double[::1] replay_vals,
        unsigned long long[::1] replay_mask):
    """Run one duel to completion; returns (winner, reason, steps).

    winner: 0 robot a, 1 robot b, 2 draw. reason: 0 collision, 1 timeout.
    With record set, replay_vals gets 8 doubles per executed step
    (x/y/heading/energy for each robot, board coordinates) and
    replay_mask the surviving-food bitmask.
    """
    cdef double* buf = <double*> malloc(
        (2 * a_nodes + 2 * b_nodes + 2 * n_food) * sizeof(double))
    cdef char* eaten = <char*> malloc(n_food if n_food > 0 else 1)
    if buf == NULL or eaten == NULL:
        if buf != NULL:
            free(buf)
        if eaten != NULL:
            free(eaten)
        raise MemoryError()
    cdef double* a_prev = buf
    cdef double* a_next = buf + a_nodes
    cdef double* b_prev = buf + 2 * a_nodes
    cdef double* b_next = buf + 2 * a_nodes + b_nodes
    cdef double* food_x = buf + 2 * a_nodes + 2 * b_nodes
    cdef double* food_y = food_x + n_food
    cdef double* tmp
    cdef int i, t, winner, reason, done
    cdef double ea, eb, cost_a, cost_b, la, ra, fa, lb, rb, fb
    cdef double dxa, dya, dxb, dyb, dx, dy, pickup2, coll2
    cdef int got_a, got_b
    cdef unsigned long long mask, bit

    for i in range(a_nodes):
        a_prev[i] = 0.0
        a_next[i] = 0.0
    for i in range(b_nodes):
        b_prev[i] = 0.0
        b_next[i] = 0.0
    for i in range(n_sensors, n_inputs):
        a_prev[i] = 1.0
        b_prev[i] = 1.0
    for i in range(n_food):
        food_x[i] = food_xy[2 * i]
        food_y[i] = food_xy[2 * i + 1]
        eaten[i] = 0

    ea = initial_energy
    eb = initial_energy
    pickup2 = pickup_radius * pickup_radius
    coll2 = collision_radius * collision_radius
    t = 0
    winner = 2
    reason = 1
    done = 0

    while not done:
        fill_senses(ax, ay, ahx, ahy, bx, by, ea, eb,
                    food_x, food_y, eaten, n_food,
                    sensor_range, wall_range, initial_energy, a_prev)
        for i in range(n_sensors, n_inputs):
            a_prev[i] = 1.0
        fill_senses(bx, by, bhx, bhy, ax, ay, eb, ea,
                    food_x, food_y, eaten, n_food,
                    sensor_range, wall_range, initial_energy, b_prev)
        for i in range(n_sensors, n_inputs):
            b_prev[i] = 1.0
        activate(a_nodes, n_inputs, a_starts, a_srcs, a_weights,
                 a_prev, a_next, slope)
        activate(b_nodes, n_inputs, b_starts, b_srcs, b_weights,
                 b_prev, b_next, slope)
        la = a_next[n_inputs]
        ra = a_next[n_inputs + 1]
        fa = a_next[n_inputs + 2]
        lb = b_next[n_inputs]
        rb = b_next[n_inputs + 1]
        fb = b_next[n_inputs + 2]
        tmp = a_prev
        a_prev = a_next
        a_next = tmp
        tmp = b_prev
        b_prev = b_next
        b_next = tmp

        cost_a = do_move(&ax, &ay, &ahx, &ahy, la, ra, fa)
        cost_b = do_move(&bx, &by, &bhx, &bhy, lb, rb, fb)
        ea = ea - cost_a
        eb = eb - cost_b
        for i in range(n_food):
            if eaten[i]:
                continue
            dxa = food_x[i] - ax
            dya = food_y[i] - ay
            got_a = dxa * dxa + dya * dya <= pickup2
            dxb = food_x[i] - bx
            dyb = food_y[i] - by
            got_b = dxb * dxb + dyb * dyb <= pickup2
            if got_a:
                ea = ea + food_energy
            if got_b:
                eb = eb + food_energy
            if got_a or got_b:
                eaten[i] = 1
        t = t + 1
        dx = bx - ax
        dy = by - ay
        if dx * dx + dy * dy <= coll2:
            if ea > eb:
                winner = 0
            elif eb > ea:
                winner = 1
            else:
                winner = 2
            reason = 0
            done = 1
        elif t >= max_steps:
            winner = 2
            reason = 1
            done = 1
        if record:
            replay_vals[(t - 1) * 8 + 0] = ax + 300.0
            replay_vals[(t - 1) * 8 + 1] = ay + 300.0
            replay_vals[(t - 1) * 8 + 2] = atan2(ahy, ahx)
            replay_vals[(t - 1) * 8 + 3] = ea
            replay_vals[(t - 1) * 8 + 4] = bx + 300.0
            replay_vals[(t - 1) * 8 + 5] = by + 300.0
            replay_vals[(t - 1) * 8 + 6] = atan2(bhy, bhx)
            replay_vals[(t - 1) * 8 + 7] = eb
            mask = 0
            bit = 1
            for i in range(n_food):
                if not eaten[i]:
                    mask = mask | bit
                bit = bit << 1
            replay_mask[t - 1] = mask

    free(buf)
    free(eaten)
    return winner, reason, t
