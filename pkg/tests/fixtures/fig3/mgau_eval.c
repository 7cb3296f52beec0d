int32 mgau_eval(mgau_model_t *g, int32 m, int32 *active)
{
    int32 j, c;
    int32 score;

    score = 0;
    for (j = 0; active[j] >= 0; j++) {
        c = active[j];
    }
    return score;
}
