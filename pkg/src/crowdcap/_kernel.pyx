# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled run loop. Mirrors engine.steps() operation for operation.

Floating-point expressions are written in the same order as the Python path
so both backends produce bit-identical results.
"""

import numpy as np
cimport numpy as cnp

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport NAN
from libcpp.pair cimport pair
from libcpp.queue cimport priority_queue
from libcpp.vector cimport vector
from numpy.random cimport bitgen_t

cnp.import_array()

ctypedef long long i64
ctypedef pair[double, i64] Entry


cdef struct Trace:
    vector[signed char] kinds
    vector[long long] ticks
    vector[long long] agents
    vector[long long] sigs
    vector[double] levels


cdef inline void emit(Trace* tr, signed char kind, long long t, long long a, long long s, double lv) noexcept nogil:
    tr.kinds.push_back(kind)
    tr.ticks.push_back(t)
    tr.agents.push_back(a)
    tr.sigs.push_back(s)
    tr.levels.push_back(lv)


def run_loop(object bit_generator,
             const double[::1] motivation,
             const double[::1] success,
             cnp.int64_t[::1] agent_attempts,
             const double[::1] difficulty,
             const double[::1] cost,
             double[::1] completion,
             cnp.int64_t[::1] task_attempts,
             bint collaborative,
             double theta,
             double eps,
             long long period,
             int filter_kind,
             double filter_threshold,
             long long start_tick,
             long long budget,
             bint early_stop,
             bint record_trace):
    cdef bitgen_t* rng = <bitgen_t*> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")
    cdef Py_ssize_t n_agents = motivation.shape[0]
    cdef Py_ssize_t n_tasks = difficulty.shape[0]
    cdef Py_ssize_t i, j, k
    cdef long long t = start_tick
    cdef long long draws = 0
    cdef long long total = 0, completed = 0, accepted = 0, tasks_done = 0
    cdef long long flush_id = 0
    cdef double total_cost = 0.0
    cdef double noise, gain, level, prior, c
    cdef long long first_open = 0
    cdef long long open_tasks = 0
    cdef long long sig
    cdef bint found, do_flush
    cdef Trace tr
    cdef vector[long long] buf_task
    cdef vector[double] buf_level
    cdef priority_queue[Entry] heap
    cdef vector[long long] stamp = vector[i64](n_tasks, -1)
    cdef vector[long long] seen = vector[i64](n_tasks, -1)
    cdef vector[char] counted = vector[char](n_tasks, 0)

    for j in range(n_tasks):
        if completion[j] < theta:
            open_tasks += 1
            if collaborative:
                heap.push(Entry(-completion[j], -j))

    with bit_generator.lock, nogil:
        while t <= budget:
            # steps 1 and 2
            for i in range(n_agents):
                draws += 1
                if not (rng.next_double(rng.state) < motivation[i]):
                    continue
                if record_trace:
                    emit(&tr, 0, t, i, -1, NAN)
                found = False
                if collaborative:
                    while not heap.empty():
                        c = -heap.top().first
                        sig = -heap.top().second
                        if completion[sig] == c and c < theta:
                            found = True
                            break
                        heap.pop()
                else:
                    sig = first_open
                    while sig < n_tasks and completion[sig] >= theta:
                        sig += 1
                    first_open = sig
                    while sig < n_tasks:
                        if completion[sig] < theta and stamp[sig] != t:
                            found = True
                            stamp[sig] = t
                            break
                        sig += 1
                if not found:
                    continue
                prior = completion[sig]
                if record_trace:
                    emit(&tr, 1, t, i, sig, prior)
                if eps > 0.0:
                    draws += 1
                    noise = (1.0 - eps) + (2.0 * eps) * rng.next_double(rng.state)
                else:
                    noise = 1.0
                gain = success[i] * (1.0 - difficulty[sig]) * noise
                if collaborative:
                    level = min(1.0, max(0.0, prior + gain))
                else:
                    level = min(1.0, max(0.0, gain))
                    if prior >= level:
                        level = prior
                completion[sig] = level
                task_attempts[sig] += 1
                agent_attempts[i] += 1
                if prior < theta and theta <= level:
                    open_tasks -= 1
                if collaborative and level != prior and level < theta:
                    heap.push(Entry(-level, -sig))
                buf_task.push_back(sig)
                buf_level.push_back(level)
                total += 1
                if level >= theta:
                    completed += 1
                if record_trace:
                    emit(&tr, 2, t, i, sig, level)

            t += 1
            do_flush = (t - 1) % period == 0
            if not do_flush and early_stop and open_tasks == 0 and buf_task.size() > 0:
                do_flush = True
            elif not do_flush and t > budget and buf_task.size() > 0:
                do_flush = True
            if do_flush:
                # step 3
                flush_id += 1
                if filter_kind == 0:
                    accepted += <long long> buf_task.size()
                elif filter_kind == 1:
                    for k in range(<Py_ssize_t> buf_level.size()):
                        if buf_level[k] >= filter_threshold:
                            accepted += 1
                else:
                    for k in range(<Py_ssize_t> buf_task.size()):
                        if seen[buf_task[k]] != flush_id:
                            seen[buf_task[k]] = flush_id
                            accepted += 1
                for k in range(<Py_ssize_t> buf_task.size()):
                    total_cost += cost[buf_task[k]]
                buf_task.clear()
                buf_level.clear()
                if record_trace:
                    emit(&tr, 3, t - 1, -1, -1, NAN)
                for j in range(n_tasks):
                    if completion[j] >= theta and not counted[j]:
                        counted[j] = 1
                        tasks_done += 1
                        if record_trace:
                            emit(&tr, 4, t - 1, -1, j, completion[j])
            if early_stop and open_tasks == 0:
                break

    trace = None
    if record_trace:
        trace = (
            _to_array_i8(tr.kinds),
            _to_array_i64(tr.ticks),
            _to_array_i64(tr.agents),
            _to_array_i64(tr.sigs),
            _to_array_f64(tr.levels),
        )
    return {
        "tick": t,
        "draws": draws,
        "total_submissions": total,
        "completed_submissions": completed,
        "accepted_submissions": accepted,
        "tasks_completed": tasks_done,
        "total_cost": total_cost,
        "trace": trace,
    }


cdef object _to_array_i8(vector[signed char]& v):
    cdef Py_ssize_t n = v.size(), k
    out = np.empty(n, dtype=np.int8)
    cdef signed char[::1] view = out
    for k in range(n):
        view[k] = v[k]
    return out


cdef object _to_array_i64(vector[long long]& v):
    cdef Py_ssize_t n = v.size(), k
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] view = out
    for k in range(n):
        view[k] = v[k]
    return out


cdef object _to_array_f64(vector[double]& v):
    cdef Py_ssize_t n = v.size(), k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    for k in range(n):
        view[k] = v[k]
    return out
