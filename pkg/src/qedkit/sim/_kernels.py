"""Compiled event loops, one per network shape.

Each kernel advances one replication of a continuous-time Markov chain
through a buffer of uniform variates and returns when the buffer is used
up or the horizon is reached, so the caller can refill the buffer from a
numpy generator.  Populations and the clock live in ``state``; counters
accumulate in ``out`` under the slot indices below.

The stationary kernels walk the embedded jump chain and advance the clock
by the mean holding time ``1 / total_rate`` rather than a sampled one.
Time averages taken this way are conditional expectations of the usual
ones (same limit, smaller variance) and each event costs one uniform.
The time-varying kernel needs genuine event times for thinning and
samples them.

Statistics accrue only after the warm-up time; the conservation counters
cover the whole run.  A population above ``guard`` sets STATUS to 1.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

STATUS = 0
FRESH = 1  # fresh arrivals after warm-up
FRESH_DELAYED = 2  # fresh arrivals finding every server busy on the first attempt
FRESH_LOST = 3  # fresh arrivals turned away (blocked or held) on the first attempt
ADMITTED = 4  # entries to the room after warm-up
QUEUE_AREA = 5  # integral of the number waiting for a server
BUSY_AREA = 6  # integral of busy servers
SPACE_AREA = 7  # integral of stage-two population or occupied beds
ORBIT_AREA = 8  # integral of the orbit or the holding room
ABANDONED = 9
ATTEMPTS = 10  # attempts after warm-up, retrials included
ATTEMPTS_BLOCKED = 11
TOTAL_IN = 12  # whole-run fresh arrivals
TOTAL_OUT = 13  # whole-run service completions leaving the system
TOTAL_LOST = 14  # whole-run customers leaving without service
FINAL_POP = 15  # customers present at the end, orbit/holding included
NEEDY_ARRIVALS = 16  # Erlang-R: entries to the nurse queue
NEEDY_DELAYED = 17
OBSERVED = 18  # observed time after warm-up
N_SLOTS = 19

# state layout: [clock, pop_a, pop_b, pop_c, extra]
N_STATE = 5


@njit(cache=True)
def _observe(out, t, t_next, warmup, horizon, waiting, busy, space, orbit):
    if t_next > warmup:
        lo = t if t > warmup else warmup
        hi = t_next if t_next < horizon else horizon
        span = hi - lo
        if span > 0.0:
            out[QUEUE_AREA] += waiting * span
            out[BUSY_AREA] += busy * span
            out[SPACE_AREA] += space * span
            out[ORBIT_AREA] += orbit * span
            out[OBSERVED] += span


@njit(cache=True)
def station_kernel(lam, mu, s, cap, theta, delta, retry_blocked, retry_abandon,
                   horizon, warmup, guard, state, out, uniforms):
    """M/M/s with optional room cap, patience and retrial orbit.

    ``cap`` bounds the customers in the room (service plus queue).  With
    ``delta`` zero every blocked or abandoning customer is lost; otherwise
    blocked customers join the orbit when ``retry_blocked`` and abandoning
    ones when ``retry_abandon``.  State: room population, orbit.

    Returns:
        True once the horizon is reached.
    """
    t = state[0]
    x = int(state[1])
    orbit = int(state[2])
    done = False
    for i in range(uniforms.size):
        busy = x if x < s else s
        waiting = x - busy
        r_arr = lam
        r_att = r_arr + delta * orbit
        r_srv = r_att + mu * busy
        total = r_srv + theta * waiting
        t_next = t + 1.0 / total
        _observe(out, t, t_next, warmup, horizon, waiting, busy, 0, orbit)
        if t_next >= horizon:
            done = True
            break
        t = t_next
        live = t > warmup
        u = uniforms[i] * total
        if u < r_att:
            fresh = u < r_arr
            if fresh:
                out[TOTAL_IN] += 1
            else:
                orbit -= 1
            if live:
                out[ATTEMPTS] += 1
                if fresh:
                    out[FRESH] += 1
            if x < cap:
                if live:
                    out[ADMITTED] += 1
                    if fresh and x >= s:
                        out[FRESH_DELAYED] += 1
                x += 1
            else:
                if live:
                    out[ATTEMPTS_BLOCKED] += 1
                    if fresh:
                        out[FRESH_DELAYED] += 1
                        out[FRESH_LOST] += 1
                if retry_blocked and delta > 0.0:
                    orbit += 1
                else:
                    out[TOTAL_LOST] += 1
        elif u < r_srv:
            x -= 1
            out[TOTAL_OUT] += 1
        else:
            x -= 1
            if live:
                out[ABANDONED] += 1
            if retry_abandon and delta > 0.0:
                orbit += 1
            else:
                out[TOTAL_LOST] += 1
        if x + orbit > guard:
            out[STATUS] = 1
            done = True
            break
    state[0] = t
    state[1] = x
    state[2] = orbit
    out[FINAL_POP] = x + orbit
    return done


@njit(cache=True)
def cloud_kernel(lam, mu, kappa, s, n, delta, horizon, warmup, guard, state, out, uniforms):
    """Host servers (s, rate mu) feeding VM usage (rate kappa), n slots total.

    A request is admitted when fewer than n slots are taken; otherwise it
    joins the orbit and retries at rate delta (lost when delta is zero).
    State: host population, VM population, orbit.
    """
    t = state[0]
    x1 = int(state[1])
    x2 = int(state[2])
    orbit = int(state[3])
    done = False
    for i in range(uniforms.size):
        busy = x1 if x1 < s else s
        r_arr = lam
        r_att = r_arr + delta * orbit
        r_srv = r_att + mu * busy
        total = r_srv + kappa * x2
        t_next = t + 1.0 / total
        _observe(out, t, t_next, warmup, horizon, x1 - busy, busy, x2, orbit)
        if t_next >= horizon:
            done = True
            break
        t = t_next
        live = t > warmup
        u = uniforms[i] * total
        if u < r_att:
            fresh = u < r_arr
            if fresh:
                out[TOTAL_IN] += 1
            else:
                orbit -= 1
            if live:
                out[ATTEMPTS] += 1
                if fresh:
                    out[FRESH] += 1
            if live and fresh and x1 >= s:
                out[FRESH_DELAYED] += 1
            if x1 + x2 < n:
                if live:
                    out[ADMITTED] += 1
                x1 += 1
            else:
                if live:
                    out[ATTEMPTS_BLOCKED] += 1
                    if fresh:
                        out[FRESH_LOST] += 1
                if delta > 0.0:
                    orbit += 1
                else:
                    out[TOTAL_LOST] += 1
        elif u < r_srv:
            x1 -= 1
            x2 += 1
        else:
            x2 -= 1
            out[TOTAL_OUT] += 1
        if x1 + x2 + orbit > guard:
            out[STATUS] = 1
            done = True
            break
    state[0] = t
    state[1] = x1
    state[2] = x2
    state[3] = orbit
    out[FINAL_POP] = x1 + x2 + orbit
    return done


@njit(cache=True)
def erlang_r_kernel(lam, mu, delta, p, s, n, holding, horizon, warmup, guard, state, out, uniforms):
    """Needy and content patients sharing n beds and s nurses.

    A new patient who finds every bed taken is lost (``holding`` false) or
    waits in an unbounded holding room for the next freed bed.  Each entry
    to the needy queue (admission, a content patient turning needy, a held
    patient taking a bed) is one observation of the nurse delay.
    State: needy, content, held.
    """
    t = state[0]
    needy = int(state[1])
    content = int(state[2])
    held = int(state[3])
    done = False
    for i in range(uniforms.size):
        busy = needy if needy < s else s
        r_arr = lam
        r_stay = r_arr + p * mu * busy
        r_leave = r_stay + (1.0 - p) * mu * busy
        total = r_leave + delta * content
        t_next = t + 1.0 / total
        _observe(out, t, t_next, warmup, horizon, needy - busy, busy, needy + content, held)
        if t_next >= horizon:
            done = True
            break
        t = t_next
        live = t > warmup
        u = uniforms[i] * total
        if u < r_arr:
            out[TOTAL_IN] += 1
            if live:
                out[FRESH] += 1
                out[ATTEMPTS] += 1
            if live and needy >= s:
                out[FRESH_DELAYED] += 1
            if needy + content < n:
                if live:
                    out[ADMITTED] += 1
                    out[NEEDY_ARRIVALS] += 1
                    if needy >= s:
                        out[NEEDY_DELAYED] += 1
                needy += 1
            else:
                if live:
                    out[FRESH_LOST] += 1
                    out[ATTEMPTS_BLOCKED] += 1
                if holding:
                    held += 1
                else:
                    out[TOTAL_LOST] += 1
        elif u < r_stay:
            needy -= 1
            content += 1
        elif u < r_leave:
            needy -= 1
            out[TOTAL_OUT] += 1
            if held > 0:
                held -= 1
                if live:
                    out[ADMITTED] += 1
                    out[NEEDY_ARRIVALS] += 1
                    if needy >= s:
                        out[NEEDY_DELAYED] += 1
                needy += 1
        else:
            content -= 1
            if live:
                out[NEEDY_ARRIVALS] += 1
                if needy >= s:
                    out[NEEDY_DELAYED] += 1
            needy += 1
        if needy + content + held > guard:
            out[STATUS] = 1
            done = True
            break
    state[0] = t
    state[1] = needy
    state[2] = content
    state[3] = held
    out[FINAL_POP] = needy + content + held
    return done


@njit(cache=True)
def _rate_at(t, grid, values, period):
    rel = t - period * math.floor(t / period)
    return np.interp(rel, grid, values)


@njit(cache=True)
def timevarying_kernel(grid, values, lam_max, mu, s_levels, review, horizon, warmup, guard,
                       state, out, slice_arr, slice_del, uniforms):
    """M_t/M/s_t with periodic piecewise-linear arrivals, by thinning.

    ``grid`` starts at 0 and spans one arrival cycle; staffing window k
    covers ``[k review, (k+1) review)`` modulo the staffing cycle, and the
    delay is also sliced per window.  A staffing cut never interrupts a
    service: surplus servers leave as they finish, and the queue is served
    only while fewer than s(t) servers are busy.  Uses two uniforms per
    event.  State: clock, busy, queue, window, next change time.
    """
    period = grid[-1] - grid[0]
    n_windows = s_levels.size
    t = state[0]
    busy = int(state[1])
    queue = int(state[2])
    window = int(state[3])
    next_change = state[4]
    s = s_levels[window]
    done = False
    i = 0
    while i + 1 < uniforms.size:
        total = lam_max + mu * busy
        t_next = t - math.log(1.0 - uniforms[i]) / total
        change = next_change < t_next and next_change < horizon
        t_end = next_change if change else (horizon if t_next >= horizon else t_next)
        _observe(out, t, t_end, warmup, horizon, queue, busy, 0, 0)
        if change:
            # The pending draw is discarded at the boundary (memoryless).
            i += 1
            t = next_change
            window = (window + 1) % n_windows
            s = s_levels[window]
            next_change += review
            while queue > 0 and busy < s:
                queue -= 1
                busy += 1
            continue
        if t_next >= horizon:
            done = True
            break
        t = t_next
        live = t > warmup
        u = uniforms[i + 1] * total
        i += 2
        if u < lam_max:
            if u < _rate_at(t, grid, values, period):
                out[TOTAL_IN] += 1
                delayed = busy >= s
                if live:
                    out[FRESH] += 1
                    out[ADMITTED] += 1
                    slice_arr[window] += 1
                    if delayed:
                        out[FRESH_DELAYED] += 1
                        slice_del[window] += 1
                if delayed:
                    queue += 1
                else:
                    busy += 1
        else:
            busy -= 1
            out[TOTAL_OUT] += 1
            if queue > 0 and busy < s:
                queue -= 1
                busy += 1
        if busy + queue > guard:
            out[STATUS] = 1
            done = True
            break
    state[0] = t
    state[1] = busy
    state[2] = queue
    state[3] = window
    state[4] = next_change
    out[FINAL_POP] = busy + queue
    return done
