"""Array kernels for the hot loops.

Every function here takes and returns numpy arrays and scalars only, so it can be
compiled by numba (see :mod:`mapforge._accel`).  Conventions shared by the
callers:

* blossoming trees are stored as *codes*: one symbol per contour event,
  ``STEM`` (a stem, walked out and back), ``DOWN`` (descend an inner edge to a
  new inner vertex) and ``UP`` (climb back to the parent);
* tree edges are numbered in order of first traversal; half-edge ``2e`` points
  away from the root (towards the child or the blossom) and ``2e + 1`` back;
* a corner is identified with the half-edge leaving it clockwise, i.e. corner
  ``h`` sits at ``origin(h)`` between ``prev_cw(h)`` and ``h``;
* inner vertices of a code are numbered in preorder (order of first visit),
  blossoms follow in order of appearance.
"""

from __future__ import annotations

import numpy as np

from ._accel import kernel

STEM = 0
DOWN = 1
UP = 2

# status codes returned by kernels that can reject their input
OK = 0
ERR_UNBALANCED = 1
ERR_NOT_TREE = 2
ERR_BAD_ORIENTATION = 3


# ---------------------------------------------------------------------------
# plane trees
# ---------------------------------------------------------------------------


@kernel
def contour_walk(ptr, idx, root, n):
    """Depth-first contour of a plane tree given as lexicographic CSR children.

    Returns ``visits`` (length ``2n - 1``, closing entry included) and, for each
    step, the rank of that visit among the visits of the same vertex.
    """
    length = 2 * (n - 1) + 1
    visits = np.empty(length, np.int64)
    rank = np.zeros(length, np.int64)
    seen = np.zeros(n, np.int64)
    stack_v = np.empty(n, np.int64)
    stack_p = np.empty(n, np.int64)
    visits[0] = root
    seen[root] = 1
    i = 1
    depth = 0
    stack_v[0] = root
    stack_p[0] = ptr[root]
    while depth >= 0:
        v = stack_v[depth]
        p = stack_p[depth]
        if p < ptr[v + 1]:
            c = idx[p]
            stack_p[depth] = p + 1
            depth += 1
            stack_v[depth] = c
            stack_p[depth] = ptr[c]
            visits[i] = c
            rank[i] = seen[c]
            seen[c] += 1
            i += 1
        else:
            depth -= 1
            if depth >= 0:
                u = stack_v[depth]
                visits[i] = u
                rank[i] = seen[u]
                seen[u] += 1
                i += 1
    # the closing entry returns to the root corner
    rank[length - 1] = 0
    return visits, rank


@kernel
def preorder_walk(ptr, idx, root, n):
    """Preorder (lexicographic order) of the vertices and their depths."""
    order = np.empty(n, np.int64)
    depth = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    top = 0
    stack[0] = root
    top = 1
    k = 0
    while top > 0:
        top -= 1
        v = stack[top]
        order[k] = v
        k += 1
        for p in range(ptr[v + 1] - 1, ptr[v] - 1, -1):
            c = idx[p]
            depth[c] = depth[v] + 1
            stack[top] = c
            top += 1
    return order, depth


# ---------------------------------------------------------------------------
# Galton-Watson trees and blossoming codes
# ---------------------------------------------------------------------------


@kernel
def cycle_lemma_shift(offspring):
    """Index at which to rotate a Lukasiewicz bridge summing to ``n - 1``.

    With ``S_i = sum_{j < i} (K_j - 1)`` the rotation starts right after the
    first time the minimum of ``S_1..S_n`` is reached; the rotated walk then stays
    non-negative until its final step to ``-1``.
    """
    n = offspring.shape[0]
    s = 0
    best = 1
    arg = 0
    for i in range(n):
        s += offspring[i] - 1
        if s < best:
            best = s
            arg = i + 1
    return arg % n


@kernel
def parents_from_lukasiewicz(offspring):
    """Parent array (preorder ids) of the tree with preorder offspring counts."""
    n = offspring.shape[0]
    parent = np.full(n, -1, np.int64)
    stack_v = np.empty(n, np.int64)
    stack_left = np.empty(n, np.int64)
    top = 0
    if n == 0:
        return parent
    stack_v[0] = 0
    stack_left[0] = offspring[0]
    top = 1
    for v in range(1, n):
        while top > 0 and stack_left[top - 1] == 0:
            top -= 1
        p = stack_v[top - 1]
        stack_left[top - 1] -= 1
        parent[v] = p
        stack_v[top] = v
        stack_left[top] = offspring[v]
        top += 1
    return parent


@kernel
def build_code(offspring, stem_slots, k):
    """Code of the blossoming tree with preorder offspring and stem slot choices.

    ``stem_slots[v]`` holds the ``k`` sorted slot indices (out of
    ``offspring[v] + k``) occupied by stems; the remaining slots are children in
    preorder.
    """
    n = offspring.shape[0]
    length = 2 * (n - 1) + k * n
    code = np.empty(length, np.int8)
    stack_v = np.empty(n, np.int64)
    stack_s = np.empty(n, np.int64)
    depth = 0
    stack_v[0] = 0
    stack_s[0] = 0
    nxt = 1
    pos = 0
    while depth >= 0:
        v = stack_v[depth]
        s = stack_s[depth]
        if s == offspring[v] + k:
            depth -= 1
            if depth >= 0:
                code[pos] = UP
                pos += 1
            continue
        stack_s[depth] = s + 1
        is_stem = False
        for j in range(k):
            if stem_slots[v, j] == s:
                is_stem = True
        if is_stem:
            code[pos] = STEM
            pos += 1
        else:
            code[pos] = DOWN
            pos += 1
            depth += 1
            stack_v[depth] = nxt
            stack_s[depth] = 0
            nxt += 1
    return code


@kernel
def tree_contour(code, n):
    """Corner arrays of the blossoming tree with the given code.

    Returns, indexed by contour position ``i``: the half-edge leaving corner
    ``i``, the vertex of the corner, and whether it is a blossom corner; indexed
    by edge: stem flag, upper endpoint and lower endpoint.  Blossoms get vertex
    ids ``n, n + 1, ...`` in order of appearance.
    """
    length = code.shape[0]
    m = 0
    for s in code:
        if s != UP:
            m += 1
    ncorner = 2 * m
    c_he = np.empty(ncorner, np.int64)
    c_vertex = np.empty(ncorner, np.int64)
    c_blossom = np.zeros(ncorner, np.bool_)
    e_stem = np.zeros(m, np.bool_)
    e_top = np.empty(m, np.int64)
    e_bottom = np.empty(m, np.int64)
    path_v = np.empty(n, np.int64)
    path_e = np.empty(n, np.int64)
    depth = 0
    path_v[0] = 0
    path_e[0] = -1
    u = 0
    e_next = 0
    v_next = 1
    b_next = n
    ci = 0
    for t in range(length):
        s = code[t]
        if s == DOWN:
            e = e_next
            e_next += 1
            x = v_next
            v_next += 1
            c_he[ci] = 2 * e
            c_vertex[ci] = u
            ci += 1
            e_top[e] = u
            e_bottom[e] = x
            depth += 1
            path_v[depth] = x
            path_e[depth] = e
            u = x
        elif s == UP:
            e = path_e[depth]
            c_he[ci] = 2 * e + 1
            c_vertex[ci] = u
            ci += 1
            depth -= 1
            u = path_v[depth]
        else:
            e = e_next
            e_next += 1
            b = b_next
            b_next += 1
            e_stem[e] = True
            e_top[e] = u
            e_bottom[e] = b
            c_he[ci] = 2 * e
            c_vertex[ci] = u
            ci += 1
            c_he[ci] = 2 * e + 1
            c_vertex[ci] = b
            c_blossom[ci] = True
            ci += 1
    return c_he, c_vertex, c_blossom, e_stem, e_top, e_bottom


@kernel
def corner_labels(c_blossom, stem_step):
    """Corner labelling along the contour: start at 2, then -1 / 0 / +stem_step."""
    N = c_blossom.shape[0]
    lab = np.empty(N, np.int64)
    cur = 2
    for i in range(N):
        lab[i] = cur
        if c_blossom[i]:
            cur += stem_step
        elif i + 1 < N and c_blossom[i + 1]:
            pass
        elif i + 1 < N:
            cur -= 1
    return lab


@kernel
def reroot_code(c_he, e_stem, start):
    """Code of the same blossoming tree re-planted at corner ``start``.

    Also returns, for every vertex id of the input (inner vertices first), its
    preorder id in the re-planted tree (blossoms keep their relative order).
    """
    N = c_he.shape[0]
    m = N // 2
    nstem = 0
    for e in range(m):
        if e_stem[e]:
            nstem += 1
    code = np.empty(N - nstem, np.int8)
    seen = np.zeros(m, np.bool_)
    pos = 0
    i = 0
    while i < N:
        h = c_he[(start + i) % N]
        e = h >> 1
        if e_stem[e]:
            code[pos] = STEM
            pos += 1
            i += 2
        else:
            if seen[e]:
                code[pos] = UP
            else:
                code[pos] = DOWN
                seen[e] = True
            pos += 1
            i += 1
    return code


@kernel
def reroot_vertex_map(c_vertex, c_blossom, start, n):
    """Preorder id, in the tree re-planted at ``start``, of each inner vertex."""
    N = c_vertex.shape[0]
    new_id = np.full(n, -1, np.int64)
    k = 0
    for i in range(N):
        j = (start + i) % N
        if not c_blossom[j]:
            v = c_vertex[j]
            if new_id[v] < 0:
                new_id[v] = k
                k += 1
    return new_id


@kernel
def stem_matching(c_blossom, labels):
    """Successor of every blossom corner by bracket matching over the contour.

    Returns ``succ`` with ``succ[i]`` the corner matched to blossom corner ``i``
    (``-1`` when unclosed or when ``i`` is not a blossom corner).
    """
    N = c_blossom.shape[0]
    succ = np.full(N, -1, np.int64)
    st = np.empty(N, np.int64)
    top = 0
    for i in range(N):
        if c_blossom[i]:
            st[top] = i
            top += 1
        else:
            L = labels[i]
            while top > 0 and labels[st[top - 1]] == L + 1:
                top -= 1
                succ[st[top]] = i
    return succ


@kernel
def valid_labelling_from_code(code, n, stem_step):
    """Parents (preorder ids) and edge displacements of the stripped tree.

    The displacement of the edge to a child equals ``stem_step`` times the number
    of stems of the parent seen before that edge, minus one.
    """
    parent = np.full(n, -1, np.int64)
    disp = np.zeros(n, np.int64)
    stems_seen = np.zeros(n, np.int64)
    path = np.empty(n, np.int64)
    depth = 0
    path[0] = 0
    nxt = 1
    for t in range(code.shape[0]):
        s = code[t]
        u = path[depth]
        if s == STEM:
            stems_seen[u] += 1
        elif s == DOWN:
            x = nxt
            nxt += 1
            parent[x] = u
            disp[x] = stem_step * stems_seen[u] - 1
            depth += 1
            path[depth] = x
        else:
            depth -= 1
    return parent, disp


@kernel
def code_from_valid_labelling(ptr, idx, disp, root, n, k, stem_step):
    """Inverse of :func:`valid_labelling_from_code` on a lexicographic CSR tree.

    Stems are put back in front of each child edge according to the jump of the
    displacement, and after the last child so that every vertex gets ``k``.
    Returns an empty array when some sibling block is not a valid displacement
    vector (wrong alphabet, decreasing, or badly spaced).
    """
    length = 2 * (n - 1) + k * n
    code = np.empty(length, np.int8)
    bad = np.empty(0, np.int8)
    stack_v = np.empty(n, np.int64)
    stack_p = np.empty(n, np.int64)
    depth = 0
    stack_v[0] = root
    stack_p[0] = ptr[root]
    pos = 0
    while depth >= 0:
        v = stack_v[depth]
        p = stack_p[depth]
        lo = ptr[v]
        hi = ptr[v + 1]
        if p < hi:
            if p == lo:
                d = disp[idx[p]] + 1
            else:
                d = disp[idx[p]] - disp[idx[p - 1]]
            if d < 0 or d % stem_step != 0 or d // stem_step > k:
                return bad
            for _ in range(d // stem_step):
                code[pos] = STEM
                pos += 1
            c = idx[p]
            stack_p[depth] = p + 1
            code[pos] = DOWN
            pos += 1
            depth += 1
            stack_v[depth] = c
            stack_p[depth] = ptr[c]
        else:
            if hi == lo:
                d = k * stem_step
            else:
                d = 1 - disp[idx[hi - 1]]
            if d < 0 or d % stem_step != 0 or d // stem_step > k:
                return bad
            for _ in range(d // stem_step):
                code[pos] = STEM
                pos += 1
            depth -= 1
            if depth >= 0:
                code[pos] = UP
                pos += 1
    if pos != length:
        return bad
    return code


# ---------------------------------------------------------------------------
# closure and opening
# ---------------------------------------------------------------------------


@kernel
def close_kernel(c_he, c_vertex, c_blossom, e_stem, labels, n):
    """Close a balanced blossoming tree given by its corner arrays.

    Inner vertices keep their ids, ``A = n`` and ``B = n + 1``.  Tree edge ``e``
    keeps id ``e`` (a stem becomes the edge from its owner to the vertex it
    closes on) and the edge ``{A, B}`` gets the last id.  Returns ``status``,
    ``vertex_of``, ``next_cw``, ``lambda_star`` (indexed by the half-edge leaving
    each corner clockwise) and the orientation bits (edge ``e`` directed along
    half-edge ``2e + bit``).
    """
    N = c_he.shape[0]
    m = N // 2
    E = m + 1
    H = 2 * E
    A = n
    B = n + 1
    ab = 2 * m
    vertex_of = np.full(H, -1, np.int64)
    next_cw = np.full(H, -1, np.int64)
    lam = np.zeros(H, np.int64)
    orient = np.ones(E, np.int8)
    for e in range(m):
        if e_stem[e]:
            orient[e] = 0
    # bracket matching: blossom corners are opened, inner corners close the
    # blossoms whose label exceeds theirs by one
    t_first = np.full(N, -1, np.int64)
    t_last = np.full(N, -1, np.int64)
    t_next = np.full(N, -1, np.int64)
    st = np.empty(N, np.int64)
    top = 0
    for i in range(N):
        if c_blossom[i]:
            st[top] = i
            top += 1
        else:
            L = labels[i]
            while top > 0 and labels[st[top - 1]] == L + 1:
                top -= 1
                b = st[top]
                if t_last[i] < 0:
                    t_first[i] = b
                else:
                    t_next[t_last[i]] = b
                t_last[i] = b
    nv = n + 2
    first = np.full(nv, -1, np.int64)
    last = np.full(nv, -1, np.int64)
    for i in range(N):
        if c_blossom[i]:
            continue
        w = c_vertex[i]
        L = labels[i]
        b = t_first[i]
        while True:
            if b >= 0:
                h = c_he[b]
                lam[h] = L
            else:
                h = c_he[i]
                lam[h] = L
            vertex_of[h] = w
            if last[w] < 0:
                first[w] = h
            else:
                next_cw[last[w]] = h
            last[w] = h
            if b < 0:
                break
            b = t_next[b]
    for w in range(n):
        next_cw[last[w]] = first[w]
    # unclosed blossoms: label 2 goes to A, label 3 to B
    status = OK
    na = 0
    nb = 0
    a_list = np.empty(top, np.int64)
    b_list = np.empty(top, np.int64)
    for j in range(top):
        i = st[j]
        if labels[i] == 2:
            a_list[na] = c_he[i]
            na += 1
        elif labels[i] == 3:
            b_list[nb] = c_he[i]
            nb += 1
        else:
            status = ERR_UNBALANCED
    if status != OK or na == 0 or nb == 0:
        return ERR_UNBALANCED, vertex_of, next_cw, lam, orient
    # A: [t_a, ..., t_1, AB]
    prev = ab
    vertex_of[ab] = A
    lam[ab] = 0
    for j in range(na - 1, -1, -1):
        h = a_list[j]
        vertex_of[h] = A
        lam[h] = 1
        if j == na - 1:
            first[A] = h
        else:
            next_cw[prev] = h
        prev = h
    next_cw[prev] = ab
    next_cw[ab] = first[A]
    # B: [BA, t'_b, ..., t'_1]
    ba = ab + 1
    vertex_of[ba] = B
    lam[ba] = 2
    prev = ba
    for j in range(nb - 1, -1, -1):
        h = b_list[j]
        vertex_of[h] = B
        lam[h] = 2
        next_cw[prev] = h
        prev = h
    lam[b_list[nb - 1]] = 1
    next_cw[prev] = ba
    for h in range(H):
        if vertex_of[h] < 0 or next_cw[h] < 0:
            return ERR_UNBALANCED, vertex_of, next_cw, lam, orient
    return OK, vertex_of, next_cw, lam, orient


@kernel
def open_kernel(next_cw, vertex_of, orient, root, n_inner):
    """Opening: depth-first exploration from the root keeping edges oriented
    towards the explorer and turning every other first-seen edge into a stem.

    Returns ``(status, code, new_id)`` where ``new_id`` gives the preorder id of
    each explored map vertex (``-1`` for ``A`` and ``B``).
    """
    H = next_cw.shape[0]
    E = H // 2
    nv = 0
    for h in range(H):
        if vertex_of[h] + 1 > nv:
            nv = vertex_of[h] + 1
    seen = np.zeros(E, np.bool_)
    new_id = np.full(nv, -1, np.int64)
    code = np.empty(H, np.int8)
    pos = 0
    ab = next_cw[root ^ 1]
    seen[ab >> 1] = True
    v0 = vertex_of[root]
    new_id[v0] = 0
    nxt = 1
    # each frame: current half-edge being scanned and the stop half-edge
    st_h = np.empty(nv + 1, np.int64)
    st_stop = np.empty(nv + 1, np.int64)
    depth = 0
    st_h[0] = root
    st_stop[0] = root
    started = np.zeros(nv + 1, np.bool_)
    started[0] = False
    while depth >= 0:
        h = st_h[depth]
        if started[depth] and h == st_stop[depth]:
            depth -= 1
            if depth >= 0:
                code[pos] = UP
                pos += 1
            continue
        started[depth] = True
        st_h[depth] = next_cw[h]
        e = h >> 1
        if seen[e]:
            continue
        seen[e] = True
        directed = 2 * e + int(orient[e])
        if directed == (h ^ 1):
            x = vertex_of[h ^ 1]
            if new_id[x] >= 0 or depth + 1 > nv:
                return ERR_NOT_TREE, code[:0], new_id
            new_id[x] = nxt
            nxt += 1
            code[pos] = DOWN
            pos += 1
            depth += 1
            st_h[depth] = next_cw[h ^ 1]
            st_stop[depth] = h ^ 1
            started[depth] = h ^ 1 == next_cw[h ^ 1]
            if started[depth]:
                # a leaf without stems: nothing to scan
                pass
        else:
            code[pos] = STEM
            pos += 1
    if nxt != n_inner:
        return ERR_NOT_TREE, code[:0], new_id
    return OK, code[:pos], new_id


# ---------------------------------------------------------------------------
# planar maps: faces, dual searches, BFS
# ---------------------------------------------------------------------------


@kernel
def face_orbits(next_cw):
    """Face id of every half-edge (orbits of ``h -> next_cw[h ^ 1]``)."""
    H = next_cw.shape[0]
    face = np.full(H, -1, np.int64)
    nf = 0
    for h0 in range(H):
        if face[h0] >= 0:
            continue
        h = h0
        while face[h] < 0:
            face[h] = nf
            h = next_cw[h ^ 1]
        nf += 1
    return face, nf


@kernel
def vertex_orbit_count(next_cw):
    """Number of cycles of the rotation permutation."""
    H = next_cw.shape[0]
    seen = np.zeros(H, np.bool_)
    c = 0
    for h0 in range(H):
        if seen[h0]:
            continue
        c += 1
        h = h0
        while not seen[h]:
            seen[h] = True
            h = next_cw[h]
    return c


@kernel
def dual_potential(face, nf, orient, root_face):
    """0-1 BFS on faces: crossing a directed edge from its left face to its
    right face is free, crossing it the other way costs one."""
    E = orient.shape[0]
    # dual adjacency in CSR over faces: one entry per half-edge
    H = 2 * E
    deg = np.zeros(nf + 1, np.int64)
    for h in range(H):
        deg[face[h] + 1] += 1
    for f in range(nf):
        deg[f + 1] += deg[f]
    adj = np.empty(H, np.int64)
    fill = deg[:-1].copy()
    for h in range(H):
        f = face[h]
        adj[fill[f]] = h
        fill[f] += 1
    INF = 1 << 60
    dist = np.full(nf, INF, np.int64)
    dq = np.empty(2 * H + 2, np.int64)
    head = H + 1
    tail = H + 1
    dist[root_face] = 0
    dq[tail] = root_face
    tail += 1
    while head < tail:
        f = dq[head]
        head += 1
        for p in range(deg[f], deg[f + 1]):
            h = adj[p]
            g = face[h ^ 1]
            e = h >> 1
            # h has f on its left; free if h is the directed half-edge
            w = 0 if (2 * e + int(orient[e])) == h else 1
            if dist[f] + w < dist[g]:
                dist[g] = dist[f] + w
                if w == 0:
                    head -= 1
                    dq[head] = g
                else:
                    dq[tail] = g
                    tail += 1
    return dist


@kernel
def adjacency_csr(vertex_of, nv):
    """CSR adjacency (neighbour lists sorted by vertex id) and matching half-edges."""
    H = vertex_of.shape[0]
    ptr = np.zeros(nv + 1, np.int64)
    for h in range(H):
        ptr[vertex_of[h] + 1] += 1
    for v in range(nv):
        ptr[v + 1] += ptr[v]
    nbr = np.empty(H, np.int64)
    hes = np.empty(H, np.int64)
    fill = ptr[:-1].copy()
    for h in range(H):
        u = vertex_of[h]
        nbr[fill[u]] = vertex_of[h ^ 1]
        hes[fill[u]] = h
        fill[u] += 1
    for v in range(nv):
        lo = ptr[v]
        hi = ptr[v + 1]
        # insertion sort by neighbour id (degrees are small on average)
        for a in range(lo + 1, hi):
            x = nbr[a]
            y = hes[a]
            b = a - 1
            while b >= lo and nbr[b] > x:
                nbr[b + 1] = nbr[b]
                hes[b + 1] = hes[b]
                b -= 1
            nbr[b + 1] = x
            hes[b + 1] = y
    return ptr, nbr, hes


@kernel
def bfs(ptr, nbr, src):
    nv = ptr.shape[0] - 1
    dist = np.full(nv, -1, np.int64)
    q = np.empty(nv, np.int64)
    dist[src] = 0
    q[0] = src
    head = 0
    tail = 1
    while head < tail:
        u = q[head]
        head += 1
        du = dist[u] + 1
        for p in range(ptr[u], ptr[u + 1]):
            x = nbr[p]
            if dist[x] < 0:
                dist[x] = du
                q[tail] = x
                tail += 1
    return dist


@kernel
def geodesic_step(ptr, nbr, hes, dist):
    """For every vertex, the half-edge to its smallest-id neighbour one step
    closer to the BFS source (``-1`` at the source)."""
    nv = ptr.shape[0] - 1
    step = np.full(nv, -1, np.int64)
    for u in range(nv):
        if dist[u] <= 0:
            continue
        for p in range(ptr[u], ptr[u + 1]):
            if dist[nbr[p]] == dist[u] - 1:
                step[u] = hes[p]
                break
    return step


@kernel
def leftmost_successor(next_cw, vertex_of, orient, A):
    """Next half-edge on the leftmost path after each directed half-edge.

    ``-1`` when the half-edge ends at ``A`` or is not directed; ``-2`` when no
    outgoing edge exists at its head.
    """
    H = next_cw.shape[0]
    succ = np.full(H, -1, np.int64)
    for h in range(H):
        e = h >> 1
        if 2 * e + int(orient[e]) != h:
            continue
        x = vertex_of[h ^ 1]
        if x == A:
            continue
        g = next_cw[h ^ 1]
        found = -2
        while g != (h ^ 1):
            f = g >> 1
            if 2 * f + int(orient[f]) == g:
                found = g
                break
            g = next_cw[g]
        succ[h] = found
    return succ


@kernel
def path_lengths(succ, directed):
    """Number of vertices on the path obtained by iterating ``succ`` from each
    directed half-edge until it stops (``-1``).  ``-1`` marks a cycle or a
    dead end."""
    H = succ.shape[0]
    length = np.zeros(H, np.int64)
    state = np.zeros(H, np.int8)  # 0 new, 1 on stack, 2 done
    st = np.empty(H, np.int64)
    for h0 in range(H):
        if not directed[h0] or state[h0] == 2:
            continue
        top = 0
        h = h0
        bad = False
        while True:
            if state[h] == 2:
                break
            if state[h] == 1:
                bad = True
                break
            state[h] = 1
            st[top] = h
            top += 1
            s = succ[h]
            if s == -1:
                break
            if s < 0:
                bad = True
                break
            h = s
        while top > 0:
            top -= 1
            g = st[top]
            state[g] = 2
            if bad:
                length[g] = -1
            elif succ[g] == -1:
                length[g] = 2
            else:
                nx = length[succ[g]]
                length[g] = -1 if nx < 0 else nx + 1
    return length


@kernel
def modified_leftmost_walk(next_cw, vertex_of, orient, is_tree_edge, A, h0, out):
    """Modified leftmost path from half-edge ``h0``: at each vertex take the
    first half-edge clockwise after the arrival that is outgoing or an inner
    tree edge.  Writes the half-edges into ``out`` and returns their number
    (``-1`` if ``out`` overflows or the walk gets stuck)."""
    H = next_cw.shape[0]
    k = 0
    h = h0
    while True:
        if k >= out.shape[0]:
            return -1
        out[k] = h
        k += 1
        x = vertex_of[h ^ 1]
        if x == A:
            return k
        g = next_cw[h ^ 1]
        nxt = -1
        while g != (h ^ 1):
            f = g >> 1
            if 2 * f + int(orient[f]) == g or is_tree_edge[f]:
                nxt = g
                break
            g = next_cw[g]
        if nxt < 0 or k > H:
            return -1
        h = nxt


@kernel
def dual_bfs_tree(face, nf, root_face):
    """BFS tree of the dual map rooted at ``root_face``.  For each face returns
    the half-edge ``g`` crossed when stepping towards the root, oriented so
    that the current face lies on the left of ``g`` (``-1`` at the root)."""
    H = face.shape[0]
    deg = np.zeros(nf + 1, np.int64)
    for h in range(H):
        deg[face[h] + 1] += 1
    for f in range(nf):
        deg[f + 1] += deg[f]
    adj = np.empty(H, np.int64)
    fill = deg[:-1].copy()
    for h in range(H):
        adj[fill[face[h]]] = h
        fill[face[h]] += 1
    up = np.full(nf, -1, np.int64)
    seen = np.zeros(nf, np.bool_)
    q = np.empty(nf, np.int64)
    q[0] = root_face
    seen[root_face] = True
    head = 0
    tail = 1
    while head < tail:
        f = q[head]
        head += 1
        for p in range(deg[f], deg[f + 1]):
            h = adj[p]
            g = face[h ^ 1]
            if not seen[g]:
                seen[g] = True
                up[g] = h ^ 1
                q[tail] = g
                tail += 1
    return up


@kernel
def cycle_winding(cycle, ncycle, start_face, face, up, cnt):
    """Signed number of times the closed half-edge walk ``cycle[:ncycle]``
    separates ``start_face`` from the root face of the dual tree ``up``.

    Each crossed half-edge ``g`` (current face on its left) contributes the
    number of times the walk uses ``g`` minus the number of times it uses its
    twin.  ``cnt`` is a zeroed scratch array of size ``H``; it is left zeroed.
    """
    for i in range(ncycle):
        cnt[cycle[i]] += 1
    w = 0
    f = start_face
    while up[f] >= 0:
        g = up[f]
        w += cnt[g] - cnt[g ^ 1]
        f = face[g ^ 1]
    for i in range(ncycle):
        cnt[cycle[i]] = 0
    return w


# ---------------------------------------------------------------------------
# range minima
# ---------------------------------------------------------------------------


@kernel
def sparse_table(values):
    n = values.shape[0]
    levels = 1
    while (1 << levels) <= n:
        levels += 1
    table = np.empty((levels, n), np.int64)
    table[0, :] = values
    for j in range(1, levels):
        span = 1 << (j - 1)
        for i in range(n - (1 << j) + 1):
            a = table[j - 1, i]
            b = table[j - 1, i + span]
            table[j, i] = a if a < b else b
        for i in range(max(n - (1 << j) + 1, 0), n):
            table[j, i] = table[j - 1, i]
    return table


@kernel
def range_min(table, lo, hi):
    """Minimum of ``values[lo..hi]`` (inclusive, ``lo <= hi``)."""
    length = hi - lo + 1
    j = 0
    while (1 << (j + 1)) <= length:
        j += 1
    a = table[j, lo]
    b = table[j, hi - (1 << j) + 1]
    return a if a < b else b


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


@kernel
def check_code(code, k):
    """Number of inner vertices encoded by ``code``, or ``-1`` if malformed
    (unmatched steps or an inner vertex without exactly ``k`` stems)."""
    L = code.shape[0]
    ndown = 0
    for t in range(L):
        if code[t] == DOWN:
            ndown += 1
    n = ndown + 1
    stems = np.zeros(n, np.int64)
    path = np.empty(n, np.int64)
    depth = 0
    path[0] = 0
    nxt = 1
    for t in range(L):
        s = code[t]
        if s == STEM:
            stems[path[depth]] += 1
        elif s == DOWN:
            depth += 1
            path[depth] = nxt
            nxt += 1
        elif s == UP:
            if depth == 0:
                return -1
            depth -= 1
        else:
            return -1
    if depth != 0:
        return -1
    for v in range(n):
        if stems[v] != k:
            return -1
    return n


@kernel
def accumulate_from_root(parent, step):
    """Sum of ``step`` along root paths, for parents listed before children."""
    n = parent.shape[0]
    out = np.zeros(n, np.int64)
    for v in range(n):
        p = parent[v]
        if p >= 0:
            out[v] = out[p] + step[v]
    return out


@kernel
def vertex_minima(c_vertex, c_blossom, values, n):
    """Minimum of ``values`` over the inner corners of each inner vertex, and
    the first contour position of each inner vertex."""
    INF = 1 << 60
    out = np.full(n, INF, np.int64)
    first = np.full(n, -1, np.int64)
    for i in range(c_vertex.shape[0]):
        if c_blossom[i]:
            continue
        v = c_vertex[i]
        if values[i] < out[v]:
            out[v] = values[i]
        if first[v] < 0:
            first[v] = i
    return out, first


@kernel
def canonical_relabel(next_cw, root):
    """Relabel half-edges by breadth-first discovery from ``root`` using the
    rotation and the twin involution.  Returns ``label`` (``-1`` if unreached)
    and the canonical ``(next, twin)`` table in discovery order."""
    H = next_cw.shape[0]
    label = np.full(H, -1, np.int64)
    order = np.empty(H, np.int64)
    label[root] = 0
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        h = order[head]
        head += 1
        a = next_cw[h]
        if label[a] < 0:
            label[a] = tail
            order[tail] = a
            tail += 1
        b = h ^ 1
        if label[b] < 0:
            label[b] = tail
            order[tail] = b
            tail += 1
    table = np.full((tail, 2), -1, np.int64)
    for i in range(tail):
        h = order[i]
        table[i, 0] = label[next_cw[h]]
        table[i, 1] = label[h ^ 1]
    return label, table


@kernel
def rotation_positions(next_cw, vertex_of, nv):
    """Position of every half-edge in the clockwise rotation of its origin
    (counted from an arbitrary start) and the degree of every vertex."""
    H = next_cw.shape[0]
    pos = np.full(H, -1, np.int64)
    deg = np.zeros(nv, np.int64)
    for h0 in range(H):
        if pos[h0] >= 0:
            continue
        h = h0
        i = 0
        while pos[h] < 0:
            pos[h] = i
            i += 1
            h = next_cw[h]
        deg[vertex_of[h0]] = i
    return pos, deg


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------


@kernel
def symmetrize_blocks(ptr, idx, disp, in_span, keys):
    """Apply one uniformly random valid permutation per sibling block.

    ``keys`` holds one uniform float per CSR slot; ranking the keys of a block
    gives a uniform arrangement of its displacement multiset.  At ``in_span``
    vertices the children stay put and receive the new arrangement; elsewhere
    the children are reordered so that their displacements read the new
    arrangement, children with equal displacement keeping their relative order.
    """
    new_idx = idx.copy()
    new_disp = disp.copy()
    for v in range(ptr.shape[0] - 1):
        lo = ptr[v]
        hi = ptr[v + 1]
        d = hi - lo
        if d < 2:
            continue
        kids = idx[lo:hi]
        vals = np.empty(d, np.int64)
        for p in range(d):
            vals[p] = disp[kids[p]]
        arr = vals[np.argsort(keys[lo:hi])]
        if in_span[v]:
            for p in range(d):
                new_disp[kids[p]] = arr[p]
        else:
            src = np.argsort(vals, kind="mergesort")
            dst = np.argsort(arr, kind="mergesort")
            for q in range(d):
                new_idx[lo + dst[q]] = kids[src[q]]
    return new_idx, new_disp


@kernel
def span_fluctuation(visits, X, in_span):
    """max_j |X(r(j)) - X(r(f(j)))| with f(j) the first time >= j spent in the span."""
    m = visits.shape[0]
    nxt = X[visits[m - 1]]
    best = 0
    for j in range(m - 1, -1, -1):
        v = visits[j]
        if in_span[v]:
            nxt = X[v]
        d = abs(X[v] - nxt)
        if d > best:
            best = d
    return best


@kernel
def pair_distances(ptr, nbr, us, vs):
    """Graph distances ``d(us[i], vs[i])`` by bidirectional breadth-first search.

    Each round expands the next level of the side with the smaller frontier.
    Before a round the balls of radii ``ra`` and ``rb`` are disjoint, so
    ``d > ra + rb``; the first edge from the new level ``ra + 1`` into the
    other ball gives a walk of length at most ``ra + 1 + rb``, hence exactly
    ``d``, and the search stops there.  As the balls never overlap, one
    stamp array (``2 i + 1`` or ``2 i + 2`` for the side of pair ``i``) and one
    distance array serve both sides and are reused across pairs.  ``-1`` if
    disconnected.
    """
    nv = ptr.shape[0] - 1
    m = us.shape[0]
    out = np.full(m, -1, np.int64)
    stamp = np.zeros(nv, np.int64)
    dist = np.zeros(nv, np.int64)
    front = np.empty((2, nv), np.int64)
    nxt = np.empty(nv, np.int64)
    for i in range(m):
        a = us[i]
        b = vs[i]
        if a == b:
            out[i] = 0
            continue
        mark0 = 2 * i + 1
        mark1 = 2 * i + 2
        stamp[a] = mark0
        dist[a] = 0
        stamp[b] = mark1
        dist[b] = 0
        front[0, 0] = a
        front[1, 0] = b
        size0 = 1
        size1 = 1
        best = -1
        while size0 > 0 and size1 > 0 and best < 0:
            side = 0 if size0 <= size1 else 1
            mine = mark0 if side == 0 else mark1
            theirs = mark1 if side == 0 else mark0
            size = size0 if side == 0 else size1
            cnt = 0
            for f in range(size):
                u = front[side, f]
                du = dist[u] + 1
                for p in range(ptr[u], ptr[u + 1]):
                    x = nbr[p]
                    t = stamp[x]
                    if t == theirs:
                        best = du + dist[x]
                        break
                    if t != mine:
                        stamp[x] = mine
                        dist[x] = du
                        nxt[cnt] = x
                        cnt += 1
                if best >= 0:
                    break
            for f in range(cnt):
                front[side, f] = nxt[f]
            if side == 0:
                size0 = cnt
            else:
                size1 = cnt
        out[i] = best
    return out


@kernel
def path_last(succ, lengths):
    """Last half-edge of the path iterated by ``succ`` from each half-edge with
    a positive entry in ``lengths`` (as returned by :func:`path_lengths`);
    ``-1`` elsewhere.  Memoised chase: each half-edge is resolved once."""
    H = succ.shape[0]
    last = np.full(H, -1, np.int64)
    stack = np.empty(H, np.int64)
    for h0 in range(H):
        if lengths[h0] <= 0 or last[h0] >= 0:
            continue
        top = 0
        h = h0
        while True:
            stack[top] = h
            top += 1
            s = succ[h]
            if s < 0:
                end = h
                break
            if last[s] >= 0:
                end = last[s]
                break
            h = s
        for t in range(top):
            last[stack[t]] = end
    return last
