/* Decodes a few noiseless frames through the C API.
 *
 *   cargo build -p ldpc-streams-ffi --release
 *   cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *      target/release/libldpc_streams_ffi.a -lpthread -ldl -lm -o smoke
 */
#include <stdio.h>
#include <stdlib.h>

#include "ldpc_streams.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        LdpcStatus st_ = (call);                                           \
        if (st_ != LDPC_STATUS_OK) {                                       \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)st_,       \
                    ldpc_last_error());                                    \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    LdpcCode *code = NULL;
    CHECK(ldpc_code_generate(96, 48, 6, 1, &code));
    size_t n = ldpc_code_n(code);

    LdpcDecoderConfig cfg = ldpc_decoder_config_default();
    cfg.early_termination = true;
    LdpcStreamConfig stream = ldpc_stream_config_default();
    stream.streams = 2;
    stream.batch = 4;

    LdpcEngine *engine = NULL;
    CHECK(ldpc_engine_start(code, &cfg, &stream, &engine));
    ldpc_code_free(code);

    double *llrs = malloc(sizeof(double) * n * stream.batch);
    for (size_t i = 0; i < n * stream.batch; i++)
        llrs[i] = (i % 7 == 3) ? -0.5 : 4.0; /* a few weak wrong-sign symbols */
    for (int j = 0; j < 8; j++)
        CHECK(ldpc_engine_submit(engine, llrs, stream.batch, NULL));

    unsigned char *bits = malloc(n * stream.batch);
    size_t iterations[4];
    bool ok[4];
    int jobs = 0, frames_ok = 0;
    for (;;) {
        uint64_t id;
        size_t frames;
        LdpcStatus st = ldpc_engine_collect(engine, -1, &id, &frames, bits, iterations, ok);
        if (st == LDPC_STATUS_EMPTY)
            break;
        if (st != LDPC_STATUS_OK)
            return 1;
        jobs++;
        for (size_t s = 0; s < frames; s++)
            frames_ok += ok[s];
    }
    LdpcShutdownSummary summary;
    CHECK(ldpc_engine_shutdown(engine, true, &summary));
    ldpc_engine_free(engine);
    free(llrs);
    free(bits);

    printf("jobs %d, converged frames %d, accepted %llu\n", jobs, frames_ok,
           (unsigned long long)summary.accepted);
    return (jobs == 8 && summary.completed == 8) ? 0 : 1;
}
