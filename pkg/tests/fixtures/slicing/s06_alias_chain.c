/* target: q  keep: 5 6 7 */
void alias(int *src, int n)
{
    int *q;
    q = src;
    q[0] = n;
    q[1] = 0;
}
