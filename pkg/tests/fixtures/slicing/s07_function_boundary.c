/* target: a  function: first  keep: 5 6 7 */
void first(int *a, int n)
{
    int i;
    helper(n);
    for (i = 0; i < n; i++)
        a[i] = 0;
}
void second(int *a, int n)
{
    int j;
    j = n;
    a[j] = 1;
}
