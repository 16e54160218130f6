#include <stdio.h>

#include "serve_predict.h"

int main(void) {
    SpServe serve;
    if (sp_parse_serve("6*", &serve) != SP_STATUS_OK) {
        fprintf(stderr, "parse failed: %s\n", sp_last_error());
        return 1;
    }
    printf("direction=%d in=%d ace=%d\n", serve.direction, serve.is_in, serve.is_ace);

    if (sp_parse_serve("x", &serve) != SP_STATUS_PARSE) {
        return 1;
    }

    double x[] = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    uint32_t y[] = {0, 0, 1, 1, 2, 2};
    SpModel *model = NULL;
    if (sp_model_train(SP_MODEL_KIND_DT, x, 6, 1, y, 1, &model) != SP_STATUS_OK) {
        fprintf(stderr, "train failed: %s\n", sp_last_error());
        return 1;
    }
    uint32_t pred[6];
    sp_model_predict(model, x, 6, 1, pred);
    for (int i = 0; i < 6; i++) {
        printf("%u", pred[i]);
    }
    printf("\n");
    sp_model_free(model);
    return 0;
}
