/* Speed core: AES-round permutation, buffered generator, baseline engines,
 * and benchmark workload kernels.
 *
 * Two interchangeable AES backends:
 *   1 ("aesni") one AESENC instruction per round, runtime-detected;
 *   2 ("table") portable byte-table evaluation, same byte order as AESENC.
 * The S-box is derived at module init from the GF(2^8) definition instead of
 * a transcribed table; tests pin the classic spot values.
 *
 * All entry points are pure functions of their arguments (no hidden state),
 * so the Python layer owns engine state and stays the single source of truth.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>

#include <stdint.h>
#include <string.h>

#if defined(__x86_64__) || defined(__i386__)
#define RANDEN_X86 1
#include <x86intrin.h>
#endif

#define STATE_BYTES 256
#define KEY_BYTES 2176
#define N_ROUNDS 17
#define BUFFER_START 16

#define BACKEND_AESNI 1
#define BACKEND_TABLE 2

#define KIND_RANDEN 0
#define KIND_MT 1
#define KIND_SPLITMIX 2

static int aesni_ok = 0;

/* AESENC byte order: state cell (row r, col c) lives at byte 4*c + r. */
static const uint8_t SHIFT_ROWS[16] = {0, 5, 10, 15, 4, 9, 14, 3,
                                       8, 13, 2, 7, 12, 1, 6, 11};

/* Branch permutation: new[i] = old[SHUFFLE[i]]. */
static const uint8_t SHUFFLE[16] = {7, 2, 13, 4, 11, 8, 3, 6,
                                    15, 0, 9, 10, 1, 14, 5, 12};

static uint8_t SBOX[256];
static uint8_t XT[256]; /* xtime: multiply by x in GF(2^8) */

static inline uint8_t rotl8(uint8_t v, int r)
{
    return (uint8_t)((uint8_t)(v << r) | (v >> (8 - r)));
}

static void init_tables(void)
{
    uint8_t exp_[255], log_[256];
    uint8_t x = 1;
    int i;

    memset(log_, 0, sizeof log_);
    for (i = 0; i < 255; i++) {
        exp_[i] = x;
        log_[x] = (uint8_t)i;
        /* multiply by 0x03 (a generator): x ^= xtime(x) */
        x = (uint8_t)(x ^ (uint8_t)((x << 1) ^ ((x & 0x80) ? 0x1b : 0)));
    }
    for (i = 0; i < 256; i++) {
        uint8_t inv = i ? exp_[(255 - log_[i]) % 255] : 0;
        SBOX[i] = (uint8_t)(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^
                            rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63);
        XT[i] = (uint8_t)((i << 1) ^ ((i & 0x80) ? 0x1b : 0));
    }
}

/* ---------------- table backend ---------------- */

static void aesenc_table(const uint8_t *in, const uint8_t *key, uint8_t *out)
{
    uint8_t t[16];
    uint8_t k[16];
    int c;

    for (c = 0; c < 16; c++)
        t[c] = SBOX[in[SHIFT_ROWS[c]]];
    memcpy(k, key, 16); /* key may alias out */
    for (c = 0; c < 4; c++) {
        const uint8_t a0 = t[4 * c], a1 = t[4 * c + 1];
        const uint8_t a2 = t[4 * c + 2], a3 = t[4 * c + 3];
        const uint8_t all = (uint8_t)(a0 ^ a1 ^ a2 ^ a3);
        out[4 * c + 0] = (uint8_t)(a0 ^ all ^ XT[a0 ^ a1] ^ k[4 * c + 0]);
        out[4 * c + 1] = (uint8_t)(a1 ^ all ^ XT[a1 ^ a2] ^ k[4 * c + 1]);
        out[4 * c + 2] = (uint8_t)(a2 ^ all ^ XT[a2 ^ a3] ^ k[4 * c + 2]);
        out[4 * c + 3] = (uint8_t)(a3 ^ all ^ XT[a3 ^ a0] ^ k[4 * c + 3]);
    }
}

/* One Feistel round then branch shuffle, applied N_ROUNDS times.
 * Odd branches receive two AES rounds of the left neighbour, keyed first by
 * the schedule then by the old odd branch (the XOR comes free with AESENC). */
static void permute_table(uint8_t *state, const uint8_t *keys)
{
    uint8_t tmp[STATE_BYTES];
    uint8_t f1[16];
    const uint8_t *k = keys;
    int r, p, b;

    for (r = 0; r < N_ROUNDS; r++) {
        for (p = 0; p < 8; p++) {
            aesenc_table(state + 32 * p, k, f1);
            aesenc_table(f1, state + 32 * p + 16, state + 32 * p + 16);
            k += 16;
        }
        memcpy(tmp, state, STATE_BYTES);
        for (b = 0; b < 16; b++)
            memcpy(state + 16 * b, tmp + 16 * SHUFFLE[b], 16);
    }
}

static void inverse_permute_table(uint8_t *state, const uint8_t *keys)
{
    uint8_t tmp[STATE_BYTES];
    uint8_t f1[16];
    const uint8_t *k;
    int r, p, b;

    for (r = N_ROUNDS - 1; r >= 0; r--) {
        memcpy(tmp, state, STATE_BYTES);
        for (b = 0; b < 16; b++)
            memcpy(state + 16 * SHUFFLE[b], tmp + 16 * b, 16);
        k = keys + 128 * r;
        /* the odd-branch update XORs a value derived only from the even
         * branch, so applying it again undoes it */
        for (p = 0; p < 8; p++) {
            aesenc_table(state + 32 * p, k + 16 * p, f1);
            aesenc_table(f1, state + 32 * p + 16, state + 32 * p + 16);
        }
    }
}

/* ---------------- aesni backend ---------------- */

#ifdef RANDEN_X86

__attribute__((target("aes,sse4.1"))) static void
aesenc_ni(const uint8_t *in, const uint8_t *key, uint8_t *out)
{
    __m128i s = _mm_loadu_si128((const __m128i *)in);
    __m128i k = _mm_loadu_si128((const __m128i *)key);
    _mm_storeu_si128((__m128i *)out, _mm_aesenc_si128(s, k));
}

__attribute__((target("aes,sse4.1"))) static void
permute_aesni(uint8_t *state, const uint8_t *keys)
{
    __m128i b[16], tmp[16];
    const uint8_t *k = keys;
    int r, p, i;

    for (i = 0; i < 16; i++)
        b[i] = _mm_loadu_si128((const __m128i *)(state + 16 * i));
    for (r = 0; r < N_ROUNDS; r++) {
        for (p = 0; p < 8; p++) {
            __m128i key = _mm_loadu_si128((const __m128i *)k);
            __m128i f1 = _mm_aesenc_si128(b[2 * p], key);
            b[2 * p + 1] = _mm_aesenc_si128(f1, b[2 * p + 1]);
            k += 16;
        }
        for (i = 0; i < 16; i++)
            tmp[i] = b[i];
        for (i = 0; i < 16; i++)
            b[i] = tmp[SHUFFLE[i]];
    }
    for (i = 0; i < 16; i++)
        _mm_storeu_si128((__m128i *)(state + 16 * i), b[i]);
}

__attribute__((target("aes,sse4.1"))) static void
inverse_permute_aesni(uint8_t *state, const uint8_t *keys)
{
    __m128i b[16], tmp[16];
    int r, p, i;

    for (i = 0; i < 16; i++)
        b[i] = _mm_loadu_si128((const __m128i *)(state + 16 * i));
    for (r = N_ROUNDS - 1; r >= 0; r--) {
        for (i = 0; i < 16; i++)
            tmp[SHUFFLE[i]] = b[i];
        for (i = 0; i < 16; i++)
            b[i] = tmp[i];
        for (p = 0; p < 8; p++) {
            __m128i key =
                _mm_loadu_si128((const __m128i *)(keys + 128 * r + 16 * p));
            __m128i f1 = _mm_aesenc_si128(b[2 * p], key);
            b[2 * p + 1] = _mm_aesenc_si128(f1, b[2 * p + 1]);
        }
    }
    for (i = 0; i < 16; i++)
        _mm_storeu_si128((__m128i *)(state + 16 * i), b[i]);
}

#endif /* RANDEN_X86 */

/* ---------------- dispatch ---------------- */

static void permute_bk(uint8_t *state, const uint8_t *keys, int backend)
{
#ifdef RANDEN_X86
    if (backend == BACKEND_AESNI) {
        permute_aesni(state, keys);
        return;
    }
#endif
    permute_table(state, keys);
}

static void inverse_permute_bk(uint8_t *state, const uint8_t *keys, int backend)
{
#ifdef RANDEN_X86
    if (backend == BACKEND_AESNI) {
        inverse_permute_aesni(state, keys);
        return;
    }
#endif
    inverse_permute_table(state, keys);
}

static void aesenc_bk(const uint8_t *in, const uint8_t *key, uint8_t *out,
                      int backend)
{
#ifdef RANDEN_X86
    if (backend == BACKEND_AESNI) {
        aesenc_ni(in, key, out);
        return;
    }
#endif
    aesenc_table(in, key, out);
}

/* Permute then XOR the previous two inner words back in (backup security:
 * recovering the state after output still leaves the pre-image unknown). */
static void generate_bk(uint8_t *state, const uint8_t *keys, int backend)
{
    uint8_t inner[BUFFER_START];
    int i;

    memcpy(inner, state, BUFFER_START);
    permute_bk(state, keys, backend);
    for (i = 0; i < BUFFER_START; i++)
        state[i] ^= inner[i];
}

/* ---------------- engines ---------------- */

#define MT_NN 312
#define MT_MM 156
#define MT_MATRIX_A 0xB5026F5AA96619E9ULL
#define MT_UM 0xFFFFFFFF80000000ULL
#define MT_LM 0x7FFFFFFFULL

typedef struct {
    int kind;
    int backend;
    /* randen */
    uint8_t state[STATE_BYTES];
    int cursor;
    const uint8_t *keys;
    /* mt19937-64 */
    uint64_t mt[MT_NN];
    int mti;
    /* splitmix64 */
    uint64_t sm;
} engine_t;

static void mt_seed_one(engine_t *e, uint64_t seed)
{
    int i;

    e->mt[0] = seed;
    for (i = 1; i < MT_NN; i++)
        e->mt[i] =
            6364136223846793005ULL * (e->mt[i - 1] ^ (e->mt[i - 1] >> 62)) +
            (uint64_t)i;
    e->mti = MT_NN;
}

static void mt_seed_array(engine_t *e, const uint64_t *key, int klen)
{
    uint64_t i, j, k;

    mt_seed_one(e, 19650218ULL);
    i = 1;
    j = 0;
    k = (MT_NN > klen) ? MT_NN : (uint64_t)klen;
    for (; k; k--) {
        e->mt[i] = (e->mt[i] ^ ((e->mt[i - 1] ^ (e->mt[i - 1] >> 62)) *
                                3935559000370003845ULL)) +
                   key[j] + j;
        i++;
        j++;
        if (i >= MT_NN) {
            e->mt[0] = e->mt[MT_NN - 1];
            i = 1;
        }
        if (j >= (uint64_t)klen)
            j = 0;
    }
    for (k = MT_NN - 1; k; k--) {
        e->mt[i] = (e->mt[i] ^ ((e->mt[i - 1] ^ (e->mt[i - 1] >> 62)) *
                                2862933555777941757ULL)) -
                   i;
        i++;
        if (i >= MT_NN) {
            e->mt[0] = e->mt[MT_NN - 1];
            i = 1;
        }
    }
    e->mt[0] = 1ULL << 63;
    e->mti = MT_NN;
}

static uint64_t mt_next(engine_t *e)
{
    uint64_t x;
    int i;

    if (e->mti >= MT_NN) {
        for (i = 0; i < MT_NN - MT_MM; i++) {
            x = (e->mt[i] & MT_UM) | (e->mt[i + 1] & MT_LM);
            e->mt[i] = e->mt[i + MT_MM] ^ (x >> 1) ^
                       ((x & 1) ? MT_MATRIX_A : 0);
        }
        for (; i < MT_NN - 1; i++) {
            x = (e->mt[i] & MT_UM) | (e->mt[i + 1] & MT_LM);
            e->mt[i] = e->mt[i + MT_MM - MT_NN] ^ (x >> 1) ^
                       ((x & 1) ? MT_MATRIX_A : 0);
        }
        x = (e->mt[MT_NN - 1] & MT_UM) | (e->mt[0] & MT_LM);
        e->mt[MT_NN - 1] =
            e->mt[MT_MM - 1] ^ (x >> 1) ^ ((x & 1) ? MT_MATRIX_A : 0);
        e->mti = 0;
    }
    x = e->mt[e->mti++];
    x ^= (x >> 29) & 0x5555555555555555ULL;
    x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
    x ^= (x << 37) & 0xFFF7EEE000000000ULL;
    x ^= (x >> 43);
    return x;
}

static uint64_t splitmix_next(uint64_t *s)
{
    uint64_t z = (*s += 0x9E3779B97F4A7C15ULL);

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

static void put_u64le(uint8_t *p, uint64_t v)
{
    int i;

    for (i = 0; i < 8; i++)
        p[i] = (uint8_t)(v >> (8 * i));
}

static uint64_t get_u64le(const uint8_t *p)
{
    uint64_t v = 0;
    int i;

    for (i = 7; i >= 0; i--)
        v = (v << 8) | p[i];
    return v;
}

static void engine_init(engine_t *e, int kind, const uint64_t seeds[4],
                        const uint8_t *keys, int backend)
{
    memset(e, 0, sizeof *e);
    e->kind = kind;
    e->backend = backend;
    if (kind == KIND_RANDEN) {
        /* seed words occupy state words 4, 5, 8 and 9 (the capacity part
         * beyond the first two inner words) */
        put_u64le(e->state + 8 * 4, seeds[0]);
        put_u64le(e->state + 8 * 5, seeds[1]);
        put_u64le(e->state + 8 * 8, seeds[2]);
        put_u64le(e->state + 8 * 9, seeds[3]);
        e->cursor = STATE_BYTES; /* first read triggers a refill */
        e->keys = keys;
    } else if (kind == KIND_MT) {
        mt_seed_array(e, seeds, 4);
    } else {
        e->sm = seeds[0];
    }
}

static uint64_t engine_next(engine_t *e)
{
    if (e->kind == KIND_RANDEN) {
        uint64_t v;

        if (e->cursor + 8 > STATE_BYTES) {
            generate_bk(e->state, e->keys, e->backend);
            e->cursor = BUFFER_START;
        }
        v = get_u64le(e->state + e->cursor);
        e->cursor += 8;
        return v;
    }
    if (e->kind == KIND_MT)
        return mt_next(e);
    return splitmix_next(&e->sm);
}

/* Byte stream.  For the sponge engine this serves raw buffer bytes (refill
 * only when fully consumed); the word engines emit consecutive words
 * little-endian. */
static void engine_fill(engine_t *e, uint8_t *out, Py_ssize_t n)
{
    if (e->kind == KIND_RANDEN) {
        while (n > 0) {
            Py_ssize_t take;

            if (e->cursor >= STATE_BYTES) {
                generate_bk(e->state, e->keys, e->backend);
                e->cursor = BUFFER_START;
            }
            take = STATE_BYTES - e->cursor;
            if (take > n)
                take = n;
            memcpy(out, e->state + e->cursor, take);
            e->cursor += (int)take;
            out += take;
            n -= take;
        }
        return;
    }
    while (n > 0) {
        uint8_t chunk[8];
        Py_ssize_t take = n < 8 ? n : 8;

        put_u64le(chunk, engine_next(e));
        memcpy(out, chunk, take);
        out += take;
        n -= take;
    }
}

/* ---------------- shared argument helpers ---------------- */

static int check_backend(int backend)
{
    if (backend == BACKEND_TABLE)
        return 0;
    if (backend == BACKEND_AESNI) {
        if (aesni_ok)
            return 0;
        PyErr_SetString(PyExc_RuntimeError, "hardware AES backend unavailable");
        return -1;
    }
    PyErr_Format(PyExc_ValueError, "unknown backend code %d", backend);
    return -1;
}

static int check_lengths(Py_ssize_t state_len, Py_ssize_t keys_len)
{
    if (state_len != STATE_BYTES) {
        PyErr_Format(PyExc_ValueError, "state must be %d bytes, got %zd",
                     STATE_BYTES, state_len);
        return -1;
    }
    if (keys_len != KEY_BYTES) {
        PyErr_Format(PyExc_ValueError, "key schedule must be %d bytes, got %zd",
                     KEY_BYTES, keys_len);
        return -1;
    }
    return 0;
}

/* Validate the shared (kind, seeds, keys, backend) arguments and build the
 * engine.  Each entry point parses its own full tuple first. */
static int setup_engine(engine_t *e, int kind, unsigned long long s0,
                        unsigned long long s1, unsigned long long s2,
                        unsigned long long s3, const uint8_t *keys,
                        Py_ssize_t keys_len, int backend)
{
    uint64_t seeds[4];

    if (kind < 0 || kind > 2) {
        PyErr_Format(PyExc_ValueError, "unknown engine kind %d", kind);
        return -1;
    }
    if (kind == KIND_RANDEN) {
        if (check_backend(backend) < 0)
            return -1;
        if (keys_len != KEY_BYTES) {
            PyErr_Format(PyExc_ValueError,
                         "key schedule must be %d bytes, got %zd", KEY_BYTES,
                         keys_len);
            return -1;
        }
    }
    seeds[0] = s0;
    seeds[1] = s1;
    seeds[2] = s2;
    seeds[3] = s3;
    engine_init(e, kind, seeds, keys, backend);
    return 0;
}

#define ENGINE_FMT "iKKKKy#i"

#define PARSE_ENGINE_ARGS(args, e, extra_fmt, ...)                            \
    do {                                                                      \
        int kind_, backend_;                                                  \
        unsigned long long s0_, s1_, s2_, s3_;                                \
        const uint8_t *keys_;                                                 \
        Py_ssize_t keys_len_;                                                 \
                                                                              \
        if (!PyArg_ParseTuple(args, ENGINE_FMT extra_fmt, &kind_, &s0_, &s1_, \
                              &s2_, &s3_, &keys_, &keys_len_, &backend_,      \
                              __VA_ARGS__))                                   \
            return NULL;                                                      \
        if (setup_engine(e, kind_, s0_, s1_, s2_, s3_, keys_, keys_len_,      \
                         backend_) < 0)                                       \
            return NULL;                                                      \
    } while (0)

/* ---------------- module functions ---------------- */

static PyObject *py_have_aesni(PyObject *self, PyObject *noarg)
{
    return PyBool_FromLong(aesni_ok);
}

static PyObject *py_tsc_available(PyObject *self, PyObject *noarg)
{
#ifdef RANDEN_X86
    Py_RETURN_TRUE;
#else
    Py_RETURN_FALSE;
#endif
}

static PyObject *py_tsc(PyObject *self, PyObject *noarg)
{
#ifdef RANDEN_X86
    uint64_t t;

    _mm_lfence();
    t = __rdtsc();
    _mm_lfence();
    return PyLong_FromUnsignedLongLong(t);
#else
    PyErr_SetString(PyExc_RuntimeError, "cycle counter unavailable");
    return NULL;
#endif
}

static PyObject *py_aes_round_blocks(PyObject *self, PyObject *args)
{
    const uint8_t *blocks, *keys;
    Py_ssize_t blocks_len, keys_len, i, n;
    int backend;
    PyObject *out;
    uint8_t *dst;

    if (!PyArg_ParseTuple(args, "y#y#i", &blocks, &blocks_len, &keys,
                          &keys_len, &backend))
        return NULL;
    if (check_backend(backend) < 0)
        return NULL;
    if (blocks_len % 16 || blocks_len != keys_len) {
        PyErr_SetString(PyExc_ValueError,
                        "blocks and keys must be equal multiples of 16 bytes");
        return NULL;
    }
    n = blocks_len / 16;
    out = PyBytes_FromStringAndSize(NULL, blocks_len);
    if (!out)
        return NULL;
    dst = (uint8_t *)PyBytes_AS_STRING(out);
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < n; i++)
        aesenc_bk(blocks + 16 * i, keys + 16 * i, dst + 16 * i, backend);
    Py_END_ALLOW_THREADS
    return out;
}

typedef void (*state_fn)(uint8_t *, const uint8_t *, int);

static PyObject *state_op(PyObject *args, state_fn fn)
{
    const uint8_t *state, *keys;
    Py_ssize_t state_len, keys_len;
    int backend;
    PyObject *out;
    uint8_t *dst;

    if (!PyArg_ParseTuple(args, "y#y#i", &state, &state_len, &keys, &keys_len,
                          &backend))
        return NULL;
    if (check_backend(backend) < 0 || check_lengths(state_len, keys_len) < 0)
        return NULL;
    out = PyBytes_FromStringAndSize(NULL, STATE_BYTES);
    if (!out)
        return NULL;
    dst = (uint8_t *)PyBytes_AS_STRING(out);
    memcpy(dst, state, STATE_BYTES);
    fn(dst, keys, backend);
    return out;
}

static PyObject *py_permute_block(PyObject *self, PyObject *args)
{
    return state_op(args, permute_bk);
}

static PyObject *py_inverse_permute_block(PyObject *self, PyObject *args)
{
    return state_op(args, inverse_permute_bk);
}

static PyObject *py_generate_block(PyObject *self, PyObject *args)
{
    return state_op(args, generate_bk);
}

static PyObject *py_advance_state(PyObject *self, PyObject *args)
{
    const uint8_t *state, *keys;
    Py_ssize_t state_len, keys_len, count, i;
    int backend;
    PyObject *out;
    uint8_t *dst;

    if (!PyArg_ParseTuple(args, "y#y#in", &state, &state_len, &keys, &keys_len,
                          &backend, &count))
        return NULL;
    if (check_backend(backend) < 0 || check_lengths(state_len, keys_len) < 0)
        return NULL;
    if (count < 0) {
        PyErr_SetString(PyExc_ValueError, "count must be >= 0");
        return NULL;
    }
    out = PyBytes_FromStringAndSize(NULL, STATE_BYTES);
    if (!out)
        return NULL;
    dst = (uint8_t *)PyBytes_AS_STRING(out);
    memcpy(dst, state, STATE_BYTES);
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < count; i++)
        generate_bk(dst, keys, backend);
    Py_END_ALLOW_THREADS
    return out;
}

static PyObject *py_fill_stream(PyObject *self, PyObject *args)
{
    const uint8_t *state, *keys;
    Py_ssize_t state_len, keys_len, nbytes;
    int backend, cursor;
    engine_t e;
    PyObject *out, *result;
    uint8_t *dst;

    if (!PyArg_ParseTuple(args, "y#iny#i", &state, &state_len, &cursor,
                          &nbytes, &keys, &keys_len, &backend))
        return NULL;
    if (check_backend(backend) < 0 || check_lengths(state_len, keys_len) < 0)
        return NULL;
    if (cursor < BUFFER_START || cursor > STATE_BYTES) {
        PyErr_Format(PyExc_ValueError, "cursor out of range: %d", cursor);
        return NULL;
    }
    if (nbytes < 0) {
        PyErr_SetString(PyExc_ValueError, "nbytes must be >= 0");
        return NULL;
    }
    memset(&e, 0, sizeof e);
    e.kind = KIND_RANDEN;
    e.backend = backend;
    memcpy(e.state, state, STATE_BYTES);
    e.cursor = cursor;
    e.keys = keys;
    out = PyBytes_FromStringAndSize(NULL, nbytes);
    if (!out)
        return NULL;
    dst = (uint8_t *)PyBytes_AS_STRING(out);
    Py_BEGIN_ALLOW_THREADS
    engine_fill(&e, dst, nbytes);
    Py_END_ALLOW_THREADS
    result = Py_BuildValue("Ny#i", out, e.state, (Py_ssize_t)STATE_BYTES,
                           e.cursor);
    return result;
}

static PyObject *py_engine_stream(PyObject *self, PyObject *args)
{
    engine_t e;
    Py_ssize_t nbytes;
    PyObject *out;
    uint8_t *dst;

    PARSE_ENGINE_ARGS(args, &e, "n", &nbytes);
    if (nbytes < 0) {
        PyErr_SetString(PyExc_ValueError, "nbytes must be >= 0");
        return NULL;
    }
    out = PyBytes_FromStringAndSize(NULL, nbytes);
    if (!out)
        return NULL;
    dst = (uint8_t *)PyBytes_AS_STRING(out);
    Py_BEGIN_ALLOW_THREADS
    engine_fill(&e, dst, nbytes);
    Py_END_ALLOW_THREADS
    return out;
}

/* ---------------- benchmark workload kernels ----------------
 * Each kernel constructs its engine from the seed, runs the whole workload
 * in one call (per-draw buffer checks included in the work), and returns a
 * result the harness can verify.  Timing happens around the call. */

static inline uint64_t mulhi64(uint64_t a, uint64_t b)
{
    return (uint64_t)(((__uint128_t)a * b) >> 64);
}

static inline double to_unit_double(uint64_t r)
{
    return (double)(r >> 11) * (1.0 / 9007199254740992.0);
}

static PyObject *py_run_loop(PyObject *self, PyObject *args)
{
    engine_t e;
    Py_ssize_t ndraws, i;
    uint64_t sink = 0;

    PARSE_ENGINE_ARGS(args, &e, "n", &ndraws);
    if (ndraws < 0) {
        PyErr_SetString(PyExc_ValueError, "ndraws must be >= 0");
        return NULL;
    }
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < ndraws; i++)
        sink ^= engine_next(&e);
    Py_END_ALLOW_THREADS
    return PyLong_FromUnsignedLongLong(sink);
}

static PyObject *py_run_shuffle(PyObject *self, PyObject *args)
{
    engine_t e;
    Py_ssize_t n, i;
    PyObject *out;
    uint32_t *arr;

    PARSE_ENGINE_ARGS(args, &e, "n", &n);
    if (n < 0 || n > 0x7fffffff) {
        PyErr_SetString(PyExc_ValueError, "bad element count");
        return NULL;
    }
    out = PyBytes_FromStringAndSize(NULL, n * 4);
    if (!out)
        return NULL;
    arr = (uint32_t *)PyBytes_AS_STRING(out);
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < n; i++)
        arr[i] = (uint32_t)i;
    for (i = n - 1; i > 0; i--) {
        uint64_t j = mulhi64(engine_next(&e), (uint64_t)i + 1);
        uint32_t t = arr[i];

        arr[i] = arr[j];
        arr[j] = t;
    }
    Py_END_ALLOW_THREADS
    return out;
}

static PyObject *py_run_sample(PyObject *self, PyObject *args)
{
    engine_t e;
    Py_ssize_t n, k, i;
    PyObject *out;
    uint64_t *res;

    PARSE_ENGINE_ARGS(args, &e, "nn", &n, &k);
    if (k < 0 || k > n) {
        PyErr_SetString(PyExc_ValueError, "need 0 <= k <= stream length");
        return NULL;
    }
    out = PyBytes_FromStringAndSize(NULL, k * 8);
    if (!out)
        return NULL;
    res = (uint64_t *)PyBytes_AS_STRING(out);
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < k; i++)
        res[i] = (uint64_t)i;
    for (i = k; i < n; i++) {
        uint64_t j = mulhi64(engine_next(&e), (uint64_t)i + 1);

        if (j < (uint64_t)k)
            res[j] = (uint64_t)i;
    }
    Py_END_ALLOW_THREADS
    return out;
}

static PyObject *py_run_montecarlo(PyObject *self, PyObject *args)
{
    engine_t e;
    Py_ssize_t n, i;
    uint64_t inside = 0;

    PARSE_ENGINE_ARGS(args, &e, "n", &n);
    if (n <= 0) {
        PyErr_SetString(PyExc_ValueError, "need at least one point");
        return NULL;
    }
    Py_BEGIN_ALLOW_THREADS
    for (i = 0; i < n; i++) {
        double x = to_unit_double(engine_next(&e));
        double y = to_unit_double(engine_next(&e));

        if (x * x + y * y <= 1.0)
            inside++;
    }
    Py_END_ALLOW_THREADS
    return Py_BuildValue("dK", 4.0 * (double)inside / (double)n, inside);
}

/* ---------------- module wiring ---------------- */

static PyMethodDef speed_methods[] = {
    {"have_aesni", py_have_aesni, METH_NOARGS,
     "True when the AES instruction backend can be used."},
    {"tsc_available", py_tsc_available, METH_NOARGS,
     "True when a CPU cycle counter can be read."},
    {"tsc", py_tsc, METH_NOARGS, "Serialised cycle counter read."},
    {"aes_round_blocks", py_aes_round_blocks, METH_VARARGS,
     "aes_round_blocks(blocks, keys, backend) -> bytes; one AES round per "
     "16-byte block."},
    {"permute_block", py_permute_block, METH_VARARGS,
     "permute_block(state, keys, backend) -> bytes"},
    {"inverse_permute_block", py_inverse_permute_block, METH_VARARGS,
     "inverse_permute_block(state, keys, backend) -> bytes"},
    {"generate_block", py_generate_block, METH_VARARGS,
     "generate_block(state, keys, backend) -> bytes; permute plus inner "
     "feed-forward."},
    {"advance_state", py_advance_state, METH_VARARGS,
     "advance_state(state, keys, backend, count) -> bytes; count refills "
     "without copying output."},
    {"fill_stream", py_fill_stream, METH_VARARGS,
     "fill_stream(state, cursor, nbytes, keys, backend) -> (out, state, "
     "cursor)"},
    {"engine_stream", py_engine_stream, METH_VARARGS,
     "engine_stream(kind, s0, s1, s2, s3, keys, backend, nbytes) -> bytes"},
    {"run_loop", py_run_loop, METH_VARARGS,
     "run_loop(kind, s0..s3, keys, backend, ndraws) -> xor checksum"},
    {"run_shuffle", py_run_shuffle, METH_VARARGS,
     "run_shuffle(kind, s0..s3, keys, backend, n) -> shuffled uint32 bytes"},
    {"run_sample", py_run_sample, METH_VARARGS,
     "run_sample(kind, s0..s3, keys, backend, n, k) -> reservoir uint64 "
     "bytes"},
    {"run_montecarlo", py_run_montecarlo, METH_VARARGS,
     "run_montecarlo(kind, s0..s3, keys, backend, npoints) -> (estimate, "
     "inside)"},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef speed_module = {
    PyModuleDef_HEAD_INIT, "randen._speed",
    "C kernels: AES backends, permutation, engines, benchmark workloads.", -1,
    speed_methods,
};

PyMODINIT_FUNC PyInit__speed(void)
{
    init_tables();
#ifdef RANDEN_X86
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    aesni_ok = __builtin_cpu_supports("aes") && __builtin_cpu_supports("sse4.1");
#endif
#endif
    return PyModule_Create(&speed_module);
}
