void lextree_hmm_histbin(lextree_t *lextree, int32 bestscr, int32 *bin, int32 *list)
{
    int32 i, ln;
    int32 nbin;

    nbin = 0;
    for (i = 0; i < lextree->n_active; i++) {
        ln = list[i];
    }
}
